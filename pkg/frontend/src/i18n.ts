/** Externalized UI strings. The study instrument itself (the six Likert
 * questions) comes from the service so its wording is shared with the
 * export; everything else lives here per locale. */

export type Locale = "en" | "pt-BR";

const STRINGS: Record<Locale, Record<string, string>> = {
  en: {
    "app.title": "Movie recommendation study",
    "consent.heading": "Consent",
    "consent.body":
      "You will build a short movie profile, receive five recommendations, " +
      "and compare two kinds of explanations for them. Your answers are " +
      "stored anonymously and used for research only. You may close this " +
      "page at any time to withdraw.",
    "consent.agree": "I have read the terms and agree to participate",
    "consent.continue": "Continue",
    "demographics.heading": "About you",
    "demographics.nationality": "Nationality",
    "demographics.education": "Highest education level",
    "demographics.age": "Age band",
    "demographics.gender": "Gender",
    "demographics.familiarity": "I have used systems that recommend items (e.g. streaming services)",
    "demographics.continue": "Continue",
    "profile.heading": "Pick exactly 10 movies you like",
    "profile.counter": "{count} of 10 selected",
    "profile.blocked": "You already picked 10 movies. Unselect one to change your choice.",
    "profile.continue": "Get my recommendations",
    "profile.loading": "Loading movies...",
    "comparison.heading": "Your recommendations",
    "comparison.intro":
      "Each recommendation comes with two explanations, shown as group A (left) " +
      "and group B (right). Read them, then answer the questions below.",
    "comparison.sideA": "Explanation A",
    "comparison.sideB": "Explanation B",
    "comparison.none": "(no explanation available)",
    "questions.heading": "Your opinion",
    "questions.submit": "Submit answers",
    "questions.missing": "Please answer all six questions before submitting.",
    "likert.MuchMoreA": "Much more A",
    "likert.MoreA": "More A",
    "likert.Equal": "Equal",
    "likert.MoreB": "More B",
    "likert.MuchMoreB": "Much more B",
    "done.heading": "Thank you!",
    "done.body": "Your answers were recorded. You can close this page now.",
    "error.retry": "Try again",
    "error.generic": "Something went wrong talking to the study server.",
    "results.heading": "Results (experimenter view)",
    "results.secret": "Results secret",
    "results.load": "Load results",
    "results.completed": "{count} completed sessions",
    "results.empty": "No completed sessions yet.",
  },
  "pt-BR": {
    "app.title": "Estudo de recomendacao de filmes",
    "consent.heading": "Consentimento",
    "consent.body":
      "Voce vai montar um perfil curto de filmes, receber cinco recomendacoes " +
      "e comparar dois tipos de explicacao. Suas respostas sao armazenadas de " +
      "forma anonima e usadas apenas para pesquisa. Voce pode fechar esta " +
      "pagina a qualquer momento para desistir.",
    "consent.agree": "Li os termos e concordo em participar",
    "consent.continue": "Continuar",
    "demographics.heading": "Sobre voce",
    "demographics.nationality": "Nacionalidade",
    "demographics.education": "Maior nivel de escolaridade",
    "demographics.age": "Faixa etaria",
    "demographics.gender": "Genero",
    "demographics.familiarity": "Ja usei sistemas que recomendam itens (por exemplo, servicos de streaming)",
    "demographics.continue": "Continuar",
    "profile.heading": "Escolha exatamente 10 filmes que voce gosta",
    "profile.counter": "{count} de 10 selecionados",
    "profile.blocked": "Voce ja escolheu 10 filmes. Desmarque um para trocar.",
    "profile.continue": "Ver minhas recomendacoes",
    "profile.loading": "Carregando filmes...",
    "comparison.heading": "Suas recomendacoes",
    "comparison.intro":
      "Cada recomendacao vem com duas explicacoes, mostradas como grupo A " +
      "(esquerda) e grupo B (direita). Leia e depois responda as perguntas abaixo.",
    "comparison.sideA": "Explicacao A",
    "comparison.sideB": "Explicacao B",
    "comparison.none": "(sem explicacao disponivel)",
    "questions.heading": "Sua opiniao",
    "questions.submit": "Enviar respostas",
    "questions.missing": "Responda as seis perguntas antes de enviar.",
    "likert.MuchMoreA": "Muito mais A",
    "likert.MoreA": "Mais A",
    "likert.Equal": "Igual",
    "likert.MoreB": "Mais B",
    "likert.MuchMoreB": "Muito mais B",
    "done.heading": "Obrigado!",
    "done.body": "Suas respostas foram registradas. Pode fechar esta pagina.",
    "error.retry": "Tentar novamente",
    "error.generic": "Algo deu errado ao falar com o servidor do estudo.",
    "results.heading": "Resultados (visao do experimentador)",
    "results.secret": "Segredo dos resultados",
    "results.load": "Carregar resultados",
    "results.completed": "{count} sessoes completas",
    "results.empty": "Nenhuma sessao completa ainda.",
  },
};

let activeLocale: Locale = "en";

export function setLocale(locale: Locale): void {
  activeLocale = locale;
}

export function getLocale(): Locale {
  return activeLocale;
}

export function t(key: string, params?: Record<string, string | number>): string {
  const table = STRINGS[activeLocale];
  let text = table[key] ?? STRINGS.en[key] ?? key;
  if (params) {
    for (const [name, value] of Object.entries(params)) {
      text = text.replace(`{${name}}`, String(value));
    }
  }
  return text;
}
