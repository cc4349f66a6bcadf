import { TrialApi } from "./api.js";
import { ResultsApp, TrialApp } from "./app.js";
import { setLocale } from "./i18n.js";
import type { Locale } from "./i18n.js";
import { browserStore } from "./state.js";

const params = new URLSearchParams(window.location.search);
const locale = params.get("lang");
if (locale === "en" || locale === "pt-BR") {
  setLocale(locale as Locale);
}

// the static bundle is mounted under /app; the API lives at the site root
const api = new TrialApi(window.location.pathname.startsWith("/app") ? "" : "");
const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app container");
}

if (window.location.hash === "#results") {
  new ResultsApp(root, api).render();
} else {
  void new TrialApp(root, api, browserStore(window.localStorage)).start();
}
