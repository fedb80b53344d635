/**
 * DOM wiring for the explorer: a control panel on the left, comparison
 * panes on the right.  All numbers shown come from server responses; the
 * client only formats them.
 */

import {
  ApiError,
  fetchAlgorithms,
  illusionUrl,
  postEstimate,
  postProcess,
  ProcessResponse,
} from "./api.js";
import { debounce } from "./debounce.js";
import { formatDegrees, formatTriplet } from "./format.js";
import { RequestSequencer } from "./sequencer.js";
import {
  BETA_RANGE,
  defaultState,
  fromQuery,
  paramsBody,
  PATTERNS,
  SessionState,
  SIGMA_RANGE,
  specBody,
  toQuery,
  VIEWS,
} from "./state.js";

const DEBOUNCE_MS = 250;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text) node.textContent = text;
  return node;
}

class Explorer {
  state: SessionState;
  private readonly sequencer = new RequestSequencer();
  private readonly refresh = debounce(() => void this.process(), DEBOUNCE_MS);
  private banner!: HTMLElement;
  private controls!: HTMLFieldSetElement;
  private panes!: HTMLElement;
  private readout!: HTMLElement;
  private estimatorSelect!: HTMLSelectElement;
  private last: ProcessResponse | null = null;

  constructor(private readonly root: HTMLElement) {
    this.state = fromQuery(window.location.search);
  }

  async start(): Promise<void> {
    this.banner = el("div", { class: "banner", hidden: "" });
    this.controls = el("fieldset", { class: "controls" });
    this.panes = el("div", { class: "panes" });
    this.readout = el("div", { class: "readout" });
    this.root.append(this.banner, this.controls, this.panes, this.readout);
    this.buildControls();
    try {
      const algos = await fetchAlgorithms();
      this.estimatorSelect.replaceChildren(
        ...algos.map((a) => el("option", { value: a }, a)),
      );
      if (!algos.includes(this.state.estimator)) this.state.estimator = algos[0];
      this.estimatorSelect.value = this.state.estimator;
    } catch {
      this.showBanner("server unreachable — controls disabled");
      this.controls.disabled = true;
      return;
    }
    void this.process();
  }

  private showBanner(message: string): void {
    this.banner.textContent = message;
    this.banner.hidden = false;
  }

  private update(patch: Partial<SessionState>): void {
    Object.assign(this.state, patch);
    history.replaceState(null, "", `?${toQuery(this.state)}`);
    this.refresh();
  }

  private slider(
    label: string,
    min: number,
    max: number,
    step: number,
    value: number,
    onInput: (v: number) => void,
  ): HTMLElement {
    const wrap = el("label", { class: "control" }, label);
    const input = el("input", {
      type: "range",
      min: String(min),
      max: String(max),
      step: String(step),
      value: String(value),
    });
    const show = el("span", {}, String(value));
    input.addEventListener("input", () => {
      show.textContent = input.value;
      onInput(Number(input.value));
    });
    wrap.append(input, show);
    return wrap;
  }

  private buildControls(): void {
    const patternSelect = el("select");
    patternSelect.replaceChildren(
      ...PATTERNS.map((p) => el("option", { value: p }, p)),
    );
    patternSelect.value = this.state.pattern;
    patternSelect.addEventListener("change", () =>
      this.update({ pattern: patternSelect.value }),
    );
    const patternWrap = el("label", { class: "control" }, "pattern");
    patternWrap.append(patternSelect);

    this.estimatorSelect = el("select");
    this.estimatorSelect.addEventListener("change", () =>
      this.update({ estimator: this.estimatorSelect.value }),
    );
    const estWrap = el("label", { class: "control" }, "estimator");
    estWrap.append(this.estimatorSelect);

    const confSelect = el("select");
    confSelect.replaceChildren(
      el("option", { value: "off" }, "off"),
      el("option", { value: "whiteness" }, "whiteness"),
    );
    confSelect.value = this.state.confidence;
    confSelect.addEventListener("change", () =>
      this.update({ confidence: confSelect.value as "off" | "whiteness" }),
    );
    const confWrap = el("label", { class: "control" }, "confidence");
    confWrap.append(confSelect);

    const viewSelect = el("select");
    viewSelect.replaceChildren(
      ...VIEWS.map((v) => el("option", { value: v }, v)),
    );
    viewSelect.value = this.state.view;
    viewSelect.addEventListener("change", () => {
      // view switches re-render from the cached response, no new request
      this.state.view = viewSelect.value as SessionState["view"];
      history.replaceState(null, "", `?${toQuery(this.state)}`);
      this.render();
    });
    const viewWrap = el("label", { class: "control" }, "view");
    viewWrap.append(viewSelect);

    const upload = el("input", { type: "file", accept: "image/png" });
    upload.addEventListener("change", () => {
      const file = upload.files?.[0];
      if (file) void this.estimateUpload(file);
    });
    const uploadWrap = el("label", { class: "control" }, "upload image");
    uploadWrap.append(upload);

    this.controls.append(
      patternWrap,
      this.slider("β block", BETA_RANGE.min, BETA_RANGE.max, 1,
        this.state.beta, (v) => this.update({ beta: v })),
      this.slider("σ spread", SIGMA_RANGE.min, SIGMA_RANGE.max, 1,
        this.state.sigma, (v) => this.update({ sigma: v })),
      this.slider("thickness", 0, 16, 1, this.state.inducerThickness,
        (v) => this.update({ inducerThickness: v })),
      this.slider("frequency", 1, 25, 0.5, this.state.inducerFrequency,
        (v) => this.update({ inducerFrequency: v })),
      estWrap,
      confWrap,
      viewWrap,
      this.slider("zoom", 0.25, 8, 0.25, this.state.zoom,
        (v) => {
          this.state.zoom = v;
          history.replaceState(null, "", `?${toQuery(this.state)}`);
          this.render();
        }),
      uploadWrap,
    );
  }

  private pane(title: string, url: string | null): HTMLElement {
    const wrap = el("figure", { class: "pane" });
    wrap.append(el("figcaption", {}, title));
    if (url) {
      const img = el("img", { src: url, alt: title });
      img.style.transform = `scale(${this.state.zoom})`;
      wrap.append(img);
    } else {
      wrap.append(el("div", { class: "placeholder" }, "no data"));
    }
    return wrap;
  }

  private async process(): Promise<void> {
    const ticket = this.sequencer.next();
    try {
      const doc = await postProcess(specBody(this.state), paramsBody(this.state));
      if (!this.sequencer.accept(ticket)) return;
      this.last = doc;
      this.banner.hidden = true;
      this.render();
    } catch (err) {
      if (!this.sequencer.accept(ticket)) return;
      this.showBanner(err instanceof ApiError ? err.message : "server unreachable");
    }
  }

  private async estimateUpload(file: File): Promise<void> {
    const ticket = this.sequencer.next();
    try {
      const doc = await postEstimate(file, paramsBody(this.state));
      if (!this.sequencer.accept(ticket)) return;
      this.banner.hidden = true;
      this.panes.replaceChildren(
        this.pane("corrected", doc.correctedUrl),
        this.pane("estimates field", doc.fieldUrl),
      );
      this.readout.replaceChildren(
        el("div", {}, `global estimate ${formatTriplet(doc.globalEstimate)}`),
        el("div", {},
          `degenerate blocks ${doc.flags.degenerateBlocks}, ` +
          `flagged pixels ${doc.flags.flaggedPixels}`),
      );
    } catch (err) {
      if (!this.sequencer.accept(ticket)) return;
      if (err instanceof ApiError && err.status === 413) {
        this.showBanner(`image too large: ${err.message}`);
      } else {
        this.showBanner(err instanceof ApiError ? err.message : "upload failed");
      }
    }
  }

  private render(): void {
    const doc = this.last;
    if (!doc) return;
    const spec = specBody(this.state);
    switch (this.state.view) {
      case "input":
        this.panes.replaceChildren(
          this.pane("input stimulus", doc.stimulusUrl));
        break;
      case "output":
        this.panes.replaceChildren(
          this.pane("input stimulus", doc.stimulusUrl),
          this.pane("output", doc.outputUrl));
        break;
      case "field":
        this.panes.replaceChildren(
          this.pane("estimates field", doc.fieldUrl));
        break;
      case "target-pair":
        this.panes.replaceChildren(
          this.pane("input target", doc.targetBeforeUrl),
          this.pane("output target", doc.targetAfterUrl));
        break;
    }
    this.panes.append(
      this.pane("spec preview", illusionUrl(spec)),
    );
    this.readout.replaceChildren(
      el("div", {}, `global estimate ${formatTriplet(doc.globalEstimate)}`),
      el("div", {},
        `mean shift ${formatDegrees(doc.meanDeltaDeg)} over ` +
        `${doc.regions.length} regions`),
    );
  }
}

export function main(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  void new Explorer(root).start();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  main();
}

export { Explorer, defaultState };
