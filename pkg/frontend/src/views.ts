/** DOM renderers for each screen.
 *
 * Everything is plain DOM with native form controls, so keyboard and
 * screen-reader behaviour comes for free; the audit in the test suite
 * checks that no interactive element breaks it.  Scorer identities never
 * appear here: the comparison screen knows only sides A and B.
 */

import type { ComparisonBundle, Demographics, ElicitationItem, ExportPayload, LikertAnswer } from "./api.js";
import { renderDivergentBars } from "./chart.js";
import { t } from "./i18n.js";

export const LIKERT_ORDER: LikertAnswer[] = ["MuchMoreA", "MoreA", "Equal", "MoreB", "MuchMoreB"];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function clear(root: HTMLElement): void {
  while (root.firstChild) root.removeChild(root.firstChild);
}

export function renderConsent(root: HTMLElement, onContinue: () => void): void {
  clear(root);
  const checkbox = el("input", { type: "checkbox", id: "consent-agree" });
  const button = el("button", { id: "consent-continue", disabled: "" }, t("consent.continue")) as HTMLButtonElement;
  checkbox.addEventListener("change", () => {
    button.disabled = !(checkbox as HTMLInputElement).checked;
  });
  button.addEventListener("click", onContinue);
  root.append(
    el("h1", {}, t("consent.heading")),
    el("p", {}, t("consent.body")),
    el("div", { class: "consent-row" }, checkbox, el("label", { for: "consent-agree" }, t("consent.agree"))),
    button,
  );
}

const AGE_BANDS = ["under 18", "18-24", "25-50", "50-60", "over 60"];
const EDUCATION = ["high school", "bachelor", "master", "phd", "other"];

export function renderDemographics(root: HTMLElement, onSubmit: (d: Demographics) => void): void {
  clear(root);
  const nationality = el("input", { type: "text", id: "demo-nationality", required: "" }) as HTMLInputElement;
  const education = el("select", { id: "demo-education" }) as HTMLSelectElement;
  for (const option of EDUCATION) education.append(el("option", { value: option }, option));
  const age = el("select", { id: "demo-age" }) as HTMLSelectElement;
  for (const option of AGE_BANDS) age.append(el("option", { value: option }, option));
  const gender = el("input", { type: "text", id: "demo-gender", required: "" }) as HTMLInputElement;
  const familiarity = el("input", { type: "checkbox", id: "demo-familiarity" }) as HTMLInputElement;
  const button = el("button", { id: "demo-continue" }, t("demographics.continue")) as HTMLButtonElement;
  const hint = el("p", { class: "field-error", hidden: "" }, t("questions.missing"));

  button.addEventListener("click", () => {
    if (!nationality.value.trim() || !gender.value.trim()) {
      hint.hidden = false;
      return;
    }
    onSubmit({
      nationality: nationality.value.trim(),
      education: education.value,
      age_band: age.value,
      gender: gender.value.trim(),
      rs_familiarity: familiarity.checked,
    });
  });

  root.append(
    el("h1", {}, t("demographics.heading")),
    el("div", { class: "field" }, el("label", { for: "demo-nationality" }, t("demographics.nationality")), nationality),
    el("div", { class: "field" }, el("label", { for: "demo-education" }, t("demographics.education")), education),
    el("div", { class: "field" }, el("label", { for: "demo-age" }, t("demographics.age")), age),
    el("div", { class: "field" }, el("label", { for: "demo-gender" }, t("demographics.gender")), gender),
    el("div", { class: "field" }, familiarity, el("label", { for: "demo-familiarity" }, t("demographics.familiarity"))),
    hint,
    button,
  );
}

export interface PickerCallbacks {
  onToggle: (item: string) => void;
  onContinue: () => void;
}

/** Checkbox list in exactly the served order; continue unlocks at exactly
 * ten picks and further picks are blocked until one is unselected. */
export function renderProfilePicker(
  root: HTMLElement,
  items: ElicitationItem[],
  selections: string[],
  callbacks: PickerCallbacks,
  limit = 10,
): void {
  clear(root);
  const atLimit = selections.length >= limit;
  const list = el("ul", { class: "picker-list", id: "picker-list" });
  for (const entry of items) {
    const selected = selections.includes(entry.item);
    const checkbox = el("input", {
      type: "checkbox",
      id: `pick-${entry.item}`,
      "data-item": entry.item,
    }) as HTMLInputElement;
    checkbox.checked = selected;
    if (!selected && atLimit) checkbox.disabled = true;
    checkbox.addEventListener("change", () => callbacks.onToggle(entry.item));
    list.append(el("li", {}, checkbox, el("label", { for: `pick-${entry.item}` }, entry.name)));
  }
  const counter = el("p", { id: "picker-counter", role: "status" }, t("profile.counter", { count: selections.length }));
  const blocked = el("p", { id: "picker-blocked", class: "hint" }, t("profile.blocked"));
  if (!atLimit) blocked.hidden = true;
  const button = el("button", { id: "picker-continue" }, t("profile.continue")) as HTMLButtonElement;
  button.disabled = selections.length !== limit;
  button.addEventListener("click", callbacks.onContinue);
  root.append(el("h1", {}, t("profile.heading")), counter, blocked, list, button);
}

export interface ComparisonCallbacks {
  onAnswer: (questionId: number, answer: LikertAnswer) => void;
  onSubmit: () => void;
}

/** One scrollable page: the five recommendation rows (recommendation in
 * the middle, column A left, column B right) followed by the six Likert
 * questions.  Submit stays disabled until every question has an answer. */
export function renderComparison(
  root: HTMLElement,
  bundle: ComparisonBundle,
  answers: Partial<Record<number, LikertAnswer>>,
  callbacks: ComparisonCallbacks,
  inlineError: string | null = null,
): void {
  clear(root);
  const rows = el("div", { class: "comparison-rows", id: "comparison-rows" });
  rows.append(
    el(
      "div",
      { class: "comparison-row comparison-header" },
      el("div", { class: "col-a" }, t("comparison.sideA")),
      el("div", { class: "col-center" }, ""),
      el("div", { class: "col-b" }, t("comparison.sideB")),
    ),
  );
  for (const entry of bundle.entries) {
    rows.append(
      el(
        "div",
        { class: "comparison-row", "data-recommended": entry.recommended },
        el("div", { class: "col-a" }, entry.sentence_a || t("comparison.none")),
        el("div", { class: "col-center" }, el("strong", {}, entry.recommended_name)),
        el("div", { class: "col-b" }, entry.sentence_b || t("comparison.none")),
      ),
    );
  }

  const form = el("form", { id: "likert-form" });
  form.addEventListener("submit", (event) => event.preventDefault());
  for (const question of bundle.questions) {
    const fieldset = el("fieldset", { "data-question": String(question.question_id) });
    fieldset.append(el("legend", {}, question.text));
    for (const option of LIKERT_ORDER) {
      const id = `q${question.question_id}-${option}`;
      const radio = el("input", {
        type: "radio",
        id,
        name: `question-${question.question_id}`,
        value: option,
      }) as HTMLInputElement;
      radio.checked = answers[question.question_id] === option;
      radio.addEventListener("change", () => callbacks.onAnswer(question.question_id, option));
      fieldset.append(el("span", { class: "likert-option" }, radio, el("label", { for: id }, t(`likert.${option}`))));
    }
    form.append(fieldset);
  }

  const submit = el("button", { id: "likert-submit" }, t("questions.submit")) as HTMLButtonElement;
  submit.disabled = !bundle.questions.every((q) => answers[q.question_id] !== undefined);
  submit.addEventListener("click", callbacks.onSubmit);

  const error = el("p", { id: "submit-error", class: "field-error" }, inlineError ?? "");
  if (!inlineError) error.hidden = true;

  root.append(
    el("h1", {}, t("comparison.heading")),
    el("p", {}, t("comparison.intro")),
    rows,
    el("h2", {}, t("questions.heading")),
    form,
    error,
    submit,
  );
}

export function renderDone(root: HTMLElement): void {
  clear(root);
  root.append(el("h1", {}, t("done.heading")), el("p", {}, t("done.body")));
}

export function renderError(root: HTMLElement, message: string, onRetry: () => void): void {
  clear(root);
  const button = el("button", { id: "retry" }, t("error.retry")) as HTMLButtonElement;
  button.addEventListener("click", onRetry);
  root.append(el("h1", {}, t("error.generic")), el("p", { class: "field-error" }, message), button);
}

export function renderResults(
  root: HTMLElement,
  payload: ExportPayload | null,
  onLoad: (secret: string) => void,
  errorMessage: string | null = null,
): void {
  clear(root);
  const secret = el("input", { type: "password", id: "results-secret" }) as HTMLInputElement;
  const button = el("button", { id: "results-load" }, t("results.load")) as HTMLButtonElement;
  button.addEventListener("click", () => onLoad(secret.value));
  root.append(
    el("h1", {}, t("results.heading")),
    el("div", { class: "field" }, el("label", { for: "results-secret" }, t("results.secret")), secret, button),
  );
  if (errorMessage) {
    root.append(el("p", { class: "field-error" }, errorMessage));
  }
  if (payload) {
    if (payload.empty) {
      root.append(el("p", {}, t("results.empty")));
      return;
    }
    root.append(el("p", { id: "results-count" }, t("results.completed", { count: payload.completed_sessions })));
    root.append(renderDivergentBars(payload));
  }
}
