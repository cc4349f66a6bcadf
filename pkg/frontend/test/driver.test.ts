/** Full participant flow driven through real DOM events against a
 * stateful fake of the trial service. */

import { beforeEach, describe, expect, it, vi } from "vitest";

import { TrialApi } from "../src/api.js";
import { TrialApp } from "../src/app.js";
import { browserStore, initialState } from "../src/state.js";

interface FakeSession {
  state: "created" | "profiled" | "completed";
  sides: Record<string, string>;
  responses: unknown[];
}

class FakeService {
  sessions = new Map<string, FakeSession>();
  log: { event: string; session: string }[] = [];
  private counter = 0;

  readonly items = Array.from({ length: 20 }, (_, i) => ({ item: `m${i}`, name: `Movie ${i}` }));
  readonly questions = [1, 2, 3, 4, 5, 6].map((id) => ({
    question_id: id,
    goal: `goal-${id}`,
    text: `Which explanation group (A or B) question ${id}?`,
  }));

  fetch = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : null;
    const respond = (payload: unknown, status = 200) =>
      new Response(JSON.stringify(payload), { status, headers: { "Content-Type": "application/json" } });

    if (url === "/sessions" && method === "POST") {
      const id = `fake-${this.counter++}`;
      this.sessions.set(id, { state: "created", sides: { A: "explod_v2", B: "pem" }, responses: [] });
      this.log.push({ event: "session_created", session: id });
      return respond({ session_id: id, state: "created" }, 201);
    }
    const match = url.match(/^\/sessions\/([^/]+)(?:\/(\w+))?$/);
    if (!match) return respond({ detail: "not found" }, 404);
    const session = this.sessions.get(decodeURIComponent(match[1]!));
    if (!session) return respond({ detail: "unknown session" }, 404);
    const action = match[2];

    if (!action) return respond({ session_id: match[1], state: session.state });
    if (action === "elicitation") return respond({ session_id: match[1], items: this.items });
    if (action === "profile" && method === "POST") {
      if (session.state !== "created") return respond({ detail: "already profiled" }, 409);
      if (!Array.isArray(body.items) || body.items.length !== 10) {
        return respond({ detail: "profile must contain exactly 10 items" }, 400);
      }
      session.state = "profiled";
      this.log.push({ event: "profile_submitted", session: match[1]! });
      this.log.push({ event: "bundle_created", session: match[1]! });
      return respond(this.bundle(match[1]!));
    }
    if (action === "comparison") {
      if (session.state === "created") return respond({ detail: "profile not submitted yet" }, 409);
      return respond(this.bundle(match[1]!));
    }
    if (action === "responses" && method === "POST") {
      if (session.state !== "profiled") return respond({ detail: "wrong state" }, 409);
      if (!Array.isArray(body.responses) || body.responses.length !== 6) {
        return respond({ detail: "six answers required" }, 400);
      }
      session.state = "completed";
      session.responses = body.responses;
      this.log.push({ event: "responses_submitted", session: match[1]! });
      return respond({ session_id: match[1], state: "completed" });
    }
    return respond({ detail: "unsupported" }, 405);
  };

  private bundle(sessionId: string) {
    return {
      session_id: sessionId,
      entries: Array.from({ length: 5 }, (_, i) => ({
        recommended: `m${10 + i}`,
        recommended_name: `Movie ${10 + i}`,
        sentence_a: `sentence A ${i}`,
        sentence_b: `sentence B ${i}`,
      })),
      questions: this.questions,
    };
  }
}

function memoryStorage() {
  const data = new Map<string, string>();
  return {
    getItem: (k: string) => data.get(k) ?? null,
    setItem: (k: string, v: string) => void data.set(k, v),
    removeItem: (k: string) => void data.delete(k),
  };
}

async function settle(): Promise<void> {
  // fetch/Response bodies can hop through macrotasks; yield timer ticks too
  for (let i = 0; i < 5; i++) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

function appRoot(): HTMLElement {
  document.body.innerHTML = '<main id="app"></main>';
  return document.getElementById("app")!;
}

describe("automated participant driver", () => {
  let fake: FakeService;

  beforeEach(() => {
    fake = new FakeService();
    vi.stubGlobal("fetch", fake.fetch);
  });

  it("completes consent -> profile(10) -> comparison(5) -> 6 answers and logs one completed session", async () => {
    const root = appRoot();
    const app = new TrialApp(root, new TrialApi(""), browserStore(memoryStorage()));
    await app.start();

    // consent
    (root.querySelector("#consent-agree") as HTMLInputElement).click();
    (root.querySelector("#consent-continue") as HTMLButtonElement).click();
    await settle();

    // demographics
    (root.querySelector("#demo-nationality") as HTMLInputElement).value = "BR";
    (root.querySelector("#demo-gender") as HTMLInputElement).value = "male";
    (root.querySelector("#demo-continue") as HTMLButtonElement).click();
    await settle();

    // profile: pick exactly 10
    for (let n = 0; n < 10; n++) {
      (root.querySelector(`input[data-item="m${n}"]`) as HTMLInputElement).click();
      await settle();
    }
    const continueButton = root.querySelector("#picker-continue") as HTMLButtonElement;
    expect(continueButton.disabled).toBe(false);
    continueButton.click();
    await settle();

    // comparison shows five rows
    expect(root.querySelectorAll(".comparison-row[data-recommended]")).toHaveLength(5);

    // six answers
    for (let q = 1; q <= 6; q++) {
      (root.querySelector(`#q${q}-MoreA`) as HTMLInputElement).click();
      await settle();
    }
    const submit = root.querySelector("#likert-submit") as HTMLButtonElement;
    expect(submit.disabled).toBe(false);
    submit.click();
    await settle();

    expect(root.textContent).toContain("Thank you!");
    const completed = [...fake.sessions.values()].filter((s) => s.state === "completed");
    expect(completed).toHaveLength(1);
    expect(fake.log.filter((e) => e.event === "responses_submitted")).toHaveLength(1);
    expect(completed[0]!.responses).toHaveLength(6);
  });

  it("deep link to the questions without a profiled session lands on the profile step", async () => {
    const storage = memoryStorage();
    const store = browserStore(storage);
    const sid = await new TrialApi("").createSession({
      nationality: "BR",
      education: "phd",
      age_band: "25-50",
      gender: "x",
      rs_familiarity: false,
    });
    store.save({ ...initialState(), step: "questions", sessionId: sid.session_id });

    const root = appRoot();
    const app = new TrialApp(root, new TrialApi(""), store);
    await app.start();
    await settle();
    expect(root.querySelector("#picker-list")).toBeTruthy();
    expect(app.state.step).toBe("profile");
  });

  it("service rejection keeps answers and shows the inline error", async () => {
    const root = appRoot();
    const app = new TrialApp(root, new TrialApi(""), browserStore(memoryStorage()));
    await app.start();
    (root.querySelector("#consent-agree") as HTMLInputElement).click();
    (root.querySelector("#consent-continue") as HTMLButtonElement).click();
    await settle();
    (root.querySelector("#demo-nationality") as HTMLInputElement).value = "BR";
    (root.querySelector("#demo-gender") as HTMLInputElement).value = "male";
    (root.querySelector("#demo-continue") as HTMLButtonElement).click();
    await settle();
    for (let n = 0; n < 10; n++) {
      (root.querySelector(`input[data-item="m${n}"]`) as HTMLInputElement).click();
      await settle();
    }
    (root.querySelector("#picker-continue") as HTMLButtonElement).click();
    await settle();
    for (let q = 1; q <= 6; q++) {
      (root.querySelector(`#q${q}-Equal`) as HTMLInputElement).click();
      await settle();
    }
    // sabotage: service now rejects the submission once
    const original = fake.fetch;
    let failures = 0;
    vi.stubGlobal("fetch", async (url: string, init?: RequestInit) => {
      if (url.endsWith("/responses") && failures === 0) {
        failures += 1;
        return new Response(JSON.stringify({ detail: "synthetic rejection" }), { status: 400 });
      }
      return original(url, init);
    });
    (root.querySelector("#likert-submit") as HTMLButtonElement).click();
    await settle();
    expect(root.querySelector("#submit-error")!.textContent).toContain("synthetic rejection");
    expect((root.querySelector("#q3-Equal") as HTMLInputElement).checked).toBe(true);

    (root.querySelector("#likert-submit") as HTMLButtonElement).click();
    await settle();
    expect(root.textContent).toContain("Thank you!");
  });
});
