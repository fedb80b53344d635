/**
 * Session state and its URL-query serialization.
 *
 * The whole explorer state round-trips through the query string so a
 * parameter combination can be shared as a link; fromQuery(toQuery(s)) is
 * the identity (asserted by tests).
 */

export type ViewMode = "input" | "output" | "field" | "target-pair";

export interface SessionState {
  pattern: string;
  inducerThickness: number;
  inducerFrequency: number;
  beta: number;
  sigma: number;
  estimator: string;
  confidence: "off" | "whiteness";
  view: ViewMode;
  zoom: number;
}

export const BETA_RANGE = { min: 2, max: 48 };
export const SIGMA_RANGE = { min: 2, max: 48 };
export const PATTERNS = ["stripe_grating", "concentric_disks", "ring_lattice"];
export const VIEWS: ViewMode[] = ["input", "output", "field", "target-pair"];

export function defaultState(): SessionState {
  return {
    pattern: "stripe_grating",
    inducerThickness: 3,
    inducerFrequency: 8,
    beta: 8,
    sigma: 24,
    estimator: "gray-world",
    confidence: "off",
    view: "output",
    zoom: 1,
  };
}

function clamp(v: number, min: number, max: number): number {
  return Math.min(Math.max(v, min), max);
}

export function toQuery(state: SessionState): string {
  const q = new URLSearchParams();
  q.set("pattern", state.pattern);
  q.set("thickness", String(state.inducerThickness));
  q.set("frequency", String(state.inducerFrequency));
  q.set("beta", String(state.beta));
  q.set("sigma", String(state.sigma));
  q.set("estimator", state.estimator);
  q.set("confidence", state.confidence);
  q.set("view", state.view);
  q.set("zoom", String(state.zoom));
  return q.toString();
}

export function fromQuery(query: string): SessionState {
  const q = new URLSearchParams(query);
  const s = defaultState();
  const pattern = q.get("pattern");
  if (pattern && PATTERNS.includes(pattern)) s.pattern = pattern;
  const num = (key: string, fallback: number): number => {
    const raw = q.get(key);
    if (raw === null) return fallback;
    const v = Number(raw);
    return Number.isFinite(v) ? v : fallback;
  };
  s.inducerThickness = clamp(num("thickness", s.inducerThickness), 0, 16);
  s.inducerFrequency = clamp(num("frequency", s.inducerFrequency), 1, 25);
  s.beta = clamp(Math.round(num("beta", s.beta)), BETA_RANGE.min, BETA_RANGE.max);
  s.sigma = clamp(num("sigma", s.sigma), SIGMA_RANGE.min, SIGMA_RANGE.max);
  const est = q.get("estimator");
  if (est) s.estimator = est;
  const conf = q.get("confidence");
  if (conf === "off" || conf === "whiteness") s.confidence = conf;
  const view = q.get("view") as ViewMode | null;
  if (view && VIEWS.includes(view)) s.view = view;
  s.zoom = clamp(num("zoom", s.zoom), 0.25, 8);
  return s;
}

/** The pipeline-params JSON object sent to the server; no client math. */
export function paramsBody(state: SessionState): Record<string, unknown> {
  return {
    beta: state.beta,
    sigma: state.sigma,
    estimator: state.estimator,
    confidence: state.confidence,
  };
}

/** The illusion-spec JSON object sent to the server. */
export function specBody(state: SessionState): Record<string, unknown> {
  return {
    pattern: state.pattern,
    inducer_thickness: state.inducerThickness,
    inducer_frequency: state.inducerFrequency,
  };
}
