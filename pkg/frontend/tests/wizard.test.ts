// Controller behaviour against a scripted fake of the session API.

import { describe, expect, it } from "vitest";

import { ApiError, NetworkError, type SessionApi } from "../src/api.js";
import { bannerLines, controlTypeFor, kindLabel } from "../src/render.js";
import { WizardController } from "../src/wizard.js";
import type {
  ChoiceResponse,
  CreateSessionResponse,
  Question,
  QuestionResponse,
  SpecResponse,
} from "../src/types.js";

const QUESTION: Question = {
  node: {
    id: "1.2.2",
    title: "Alert escalation mode",
    statement: "Pick exactly one behaviour.",
    type: "single_adaptor",
  },
  decision_kind: "single_adaptor",
  children: [
    { id: "1.2.2.1", title: "Manual alert button", statement: "s", type: "core" },
    { id: "1.2.2.2", title: "Automatic fall detection", statement: "s", type: "core" },
  ],
};

class FakeApi implements SessionApi {
  submissions: string[][] = [];
  rejectWith = [
    {
      kind: "XorViolation",
      node: "1.2.2",
      message: "Violation: Multiple children selected for XOR node 1.2.2",
    },
  ];
  completeAfter = 2;
  failNextSubmit: Error | null = null;

  async createSession(): Promise<CreateSessionResponse> {
    return {
      session_id: "s1",
      family_id: "smarthome",
      routed: true,
      mode: "interactive",
      status: "awaiting_choice",
    };
  }

  async getQuestion(): Promise<QuestionResponse> {
    return {
      session_id: "s1",
      question: QUESTION,
      violations: [],
      attempt: 1,
      progress: { decisions_answered: 0, total_discriminants: 3 },
    };
  }

  async submitChoice(_: string, ids: string[]): Promise<ChoiceResponse> {
    if (this.failNextSubmit) {
      const failure = this.failNextSubmit;
      this.failNextSubmit = null;
      throw failure;
    }
    this.submissions.push(ids);
    if (ids.length !== 1) {
      return { accepted: false, violations: this.rejectWith, next: "awaiting_choice" };
    }
    const done = this.submissions.length >= this.completeAfter;
    return { accepted: true, violations: [], next: done ? "completed" : "awaiting_choice" };
  }

  async getSpec(): Promise<SpecResponse> {
    return {
      markdown: "# smarthome specification\n",
      sidecar: {
        family_id: "smarthome",
        ids: ["1"],
        provenance: { "1": "auto-core" },
        metrics: {},
        violations: [],
      },
    };
  }
}

describe("start", () => {
  it("rejects an empty form inline without any request", async () => {
    const api = new FakeApi();
    let called = false;
    api.createSession = async () => {
      called = true;
      throw new Error("should not happen");
    };
    const wizard = new WizardController(api);
    await wizard.start({ vision: "   " });
    expect(called).toBe(false);
    expect(wizard.state.inlineError).toMatch(/family or describe/i);
    expect(wizard.state.phase).toBe("setup");
  });

  it("routes a vision and lands on the first question", async () => {
    const wizard = new WizardController(new FakeApi());
    await wizard.start({ vision: "elderly fall detection" });
    expect(wizard.state.phase).toBe("question");
    expect(wizard.state.familyId).toBe("smarthome");
    expect(wizard.state.routed).toBe(true);
    expect(wizard.state.question?.node.id).toBe("1.2.2");
  });
});

describe("choice controls", () => {
  it("radio semantics for single_adaptor in normal mode", async () => {
    const wizard = new WizardController(new FakeApi());
    await wizard.start({ familyId: "smarthome" });
    wizard.toggleChoice("1.2.2.1");
    wizard.toggleChoice("1.2.2.2");
    expect(wizard.state.selected).toEqual(["1.2.2.2"]);
    expect(controlTypeFor("single_adaptor", false)).toBe("radio");
  });

  it("expert mode lifts the radio constraint", async () => {
    const wizard = new WizardController(new FakeApi());
    await wizard.start({ familyId: "smarthome" });
    wizard.setExpertMode(true);
    wizard.toggleChoice("1.2.2.1");
    wizard.toggleChoice("1.2.2.2");
    expect(wizard.state.selected).toEqual(["1.2.2.1", "1.2.2.2"]);
    expect(controlTypeFor("single_adaptor", true)).toBe("checkbox");
    expect(wizard.canSubmit()).toBe(true);
  });

  it("hints exactly-one and at-least-one without enforcing in expert mode", async () => {
    const wizard = new WizardController(new FakeApi());
    await wizard.start({ familyId: "smarthome" });
    expect(wizard.submitHint()).toMatch(/exactly one/i);
    expect(wizard.canSubmit()).toBe(false);
    wizard.setExpertMode(true);
    expect(wizard.submitHint()).toBeNull();
    expect(wizard.canSubmit()).toBe(true);
  });

  it("labels every decision kind", () => {
    expect(kindLabel("single_adaptor")).toMatch(/exactly one/);
    expect(kindLabel("multiple_adaptor")).toMatch(/at least one/);
    expect(kindLabel("option")).toMatch(/pick any/);
  });
});

describe("submit", () => {
  it("renders server violations verbatim and keeps the selection", async () => {
    const api = new FakeApi();
    const wizard = new WizardController(api);
    await wizard.start({ familyId: "smarthome" });
    wizard.setExpertMode(true);
    wizard.toggleChoice("1.2.2.1");
    wizard.toggleChoice("1.2.2.2");
    await wizard.submit();
    expect(wizard.state.phase).toBe("question");
    expect(bannerLines(wizard.state.violations)).toEqual([
      "Violation: Multiple children selected for XOR node 1.2.2",
    ]);
    expect(wizard.state.selected).toEqual(["1.2.2.1", "1.2.2.2"]);
  });

  it("advances to the next question and finally the spec view", async () => {
    const api = new FakeApi();
    const wizard = new WizardController(api);
    await wizard.start({ familyId: "smarthome" });
    wizard.toggleChoice("1.2.2.2");
    await wizard.submit();
    expect(wizard.state.phase).toBe("question");
    expect(wizard.state.selected).toEqual([]);
    wizard.toggleChoice("1.2.2.1");
    await wizard.submit();
    expect(wizard.state.phase).toBe("completed");
    expect(wizard.state.spec?.markdown).toContain("# smarthome specification");
    expect(api.submissions).toEqual([["1.2.2.2"], ["1.2.2.1"]]);
  });

  it("network failure preserves state and offers a retry", async () => {
    const api = new FakeApi();
    const wizard = new WizardController(api);
    await wizard.start({ familyId: "smarthome" });
    wizard.toggleChoice("1.2.2.2");
    api.failNextSubmit = new NetworkError("fetch failed");
    await wizard.submit();
    expect(wizard.state.networkError).toBe("fetch failed");
    expect(wizard.state.selected).toEqual(["1.2.2.2"]);
    expect(wizard.state.phase).toBe("question");
    await wizard.retry();
    expect(wizard.state.networkError).toBeNull();
    expect(api.submissions).toEqual([["1.2.2.2"]]);
  });

  it("surfaces non-retryable api errors inline", async () => {
    const api = new FakeApi();
    const wizard = new WizardController(api);
    await wizard.start({ familyId: "smarthome" });
    wizard.toggleChoice("1.2.2.2");
    api.failNextSubmit = new ApiError(400, "bad_choice", "selected_ids must be a string array");
    await wizard.submit();
    expect(wizard.state.inlineError).toContain("bad_choice");
  });
});
