// Pure view helpers plus the DOM renderer. The string-producing functions
// are kept side-effect free so tests can assert on exactly what the analyst
// sees (violation banners must be byte-identical to the server messages).

import type { WizardController, WizardViewState } from "./wizard.js";
import type { DecisionKind, Violation } from "./types.js";

export function controlTypeFor(kind: DecisionKind, expertMode: boolean): "radio" | "checkbox" {
  if (expertMode) return "checkbox";
  return kind === "single_adaptor" ? "radio" : "checkbox";
}

export function kindLabel(kind: DecisionKind): string {
  switch (kind) {
    case "single_adaptor":
      return "choose exactly one";
    case "multiple_adaptor":
      return "choose at least one";
    case "option":
      return "optional extras, pick any";
  }
}

export function bannerLines(violations: Violation[]): string[] {
  return violations.map((violation) => violation.message);
}

export function progressLabel(state: WizardViewState): string {
  if (!state.progress) return "";
  return `${state.progress.decisions_answered} / ${state.progress.total_discriminants} decisions`;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function render(root: HTMLElement, controller: WizardController): void {
  const state = controller.state;
  root.replaceChildren();

  if (state.networkError) {
    const banner = el("div", "banner banner-network");
    banner.append(
      el("p", undefined, `Connection problem: ${state.networkError}`),
    );
    const retry = el("button", "retry", "Retry");
    retry.onclick = () => void controller.retry();
    banner.append(retry);
    root.append(banner);
  }

  if (state.phase === "setup") {
    root.append(renderSetup(controller));
    return;
  }
  if (state.phase === "completed" && state.spec) {
    root.append(renderSpec(state));
    return;
  }
  if (state.phase === "aborted") {
    root.append(el("p", "banner banner-error", "Session aborted."));
    return;
  }
  if (state.question) {
    root.append(renderQuestion(controller));
  }
}

function renderSetup(controller: WizardController): HTMLElement {
  const state = controller.state;
  const box = el("section", "setup");
  box.append(el("h2", undefined, "Start a specification"));
  const vision = el("textarea") as HTMLTextAreaElement;
  vision.placeholder = "Describe the project vision (routed automatically)...";
  vision.id = "vision-input";
  const family = el("input") as HTMLInputElement;
  family.placeholder = "...or type a family id (e.g. smarthome)";
  family.id = "family-input";
  const go = el("button", "primary", "Begin");
  go.onclick = () =>
    void controller.start({ vision: vision.value, familyId: family.value });
  box.append(vision, family, go);
  if (state.inlineError) {
    box.append(el("p", "banner banner-error", state.inlineError));
  }
  return box;
}

function renderQuestion(controller: WizardController): HTMLElement {
  const state = controller.state;
  const question = state.question!;
  const box = el("section", "question");

  const header = el("header");
  header.append(
    el("h2", undefined, `${question.node.id} ${question.node.title}`),
    el("p", "statement", question.node.statement),
    el("p", "kind", kindLabel(question.decision_kind)),
    el("p", "progress", progressLabel(state)),
  );
  if (state.routed && state.familyId) {
    header.append(el("p", "routed", `family: ${state.familyId} (routed)`));
  }
  box.append(header);

  if (state.violations.length > 0) {
    const banner = el("div", "banner banner-violation");
    for (const line of bannerLines(state.violations)) {
      banner.append(el("p", "violation-message", line));
    }
    box.append(banner);
  }

  const controlType = controlTypeFor(question.decision_kind, state.expertMode);
  const list = el("ul", "choices");
  for (const child of question.children) {
    const item = el("li");
    const label = el("label");
    const input = el("input") as HTMLInputElement;
    input.type = controlType;
    input.name = "choice";
    input.value = child.id;
    input.checked = state.selected.includes(child.id);
    input.onchange = () => controller.toggleChoice(child.id);
    label.append(input, el("span", undefined, ` ${child.id} ${child.title}`));
    item.append(label, el("p", "statement", child.statement));
    list.append(item);
  }
  box.append(list);

  const hint = controller.submitHint();
  if (hint) box.append(el("p", "hint", hint));

  const controls = el("div", "controls");
  const expert = el("label", "expert");
  const expertToggle = el("input") as HTMLInputElement;
  expertToggle.type = "checkbox";
  expertToggle.checked = state.expertMode;
  expertToggle.onchange = () => controller.setExpertMode(expertToggle.checked);
  expert.append(expertToggle, el("span", undefined, " expert mode (no client-side limits)"));
  const submit = el("button", "primary", "Submit choice") as HTMLButtonElement;
  submit.disabled = !controller.canSubmit();
  submit.onclick = () => void controller.submit();
  controls.append(expert, submit);
  box.append(controls);
  return box;
}

function renderSpec(state: WizardViewState): HTMLElement {
  const spec = state.spec!;
  const box = el("section", "spec");
  box.append(el("h2", undefined, "Specification complete"));
  box.append(
    el("p", undefined, `${spec.sidecar.ids.length} requirements selected.`),
  );
  const pre = el("pre", "spec-markdown", spec.markdown);
  box.append(pre);

  const downloads = el("div", "downloads");
  downloads.append(
    downloadLink("spec.md", spec.markdown, "text/markdown", "Download spec.md"),
    downloadLink(
      "spec.json",
      JSON.stringify(spec.sidecar, null, 2),
      "application/json",
      "Download sidecar",
    ),
  );
  box.append(downloads);
  return box;
}

function downloadLink(
  filename: string,
  content: string,
  mime: string,
  label: string,
): HTMLAnchorElement {
  const anchor = el("a", "download", label) as HTMLAnchorElement;
  anchor.href = URL.createObjectURL(new Blob([content], { type: mime }));
  anchor.download = filename;
  return anchor;
}
