/**
 * Thin fetch wrappers over the server API.  The client performs no color
 * mathematics: every displayed value originates from these responses.
 */

export interface EstimateResponse {
  globalEstimate: number[];
  params: Record<string, unknown>;
  flags: {
    degenerateBlocks: number;
    flaggedPixels: number;
    whitenessDegenerate: boolean;
  };
  timings: Record<string, number>;
  fieldUrl: string;
  correctedUrl: string;
}

export interface RegionShift {
  region: number;
  area: number;
  inducerRgb: number[];
  beforeDeg: number;
  afterDeg: number;
  deltaDeg: number;
}

export interface ProcessResponse {
  params: Record<string, unknown>;
  globalEstimate: number[];
  regions: RegionShift[];
  meanDeltaDeg: number;
  stimulusUrl: string;
  outputUrl: string;
  fieldUrl: string;
  targetBeforeUrl: string;
  targetAfterUrl: string;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function jsonOrThrow(res: Response): Promise<unknown> {
  if (!res.ok) {
    let message = `${res.status}`;
    try {
      const body = (await res.json()) as { error?: string };
      if (body.error) message = body.error;
    } catch {
      /* non-JSON error body: keep the status text */
    }
    throw new ApiError(res.status, message);
  }
  return res.json();
}

export async function fetchAlgorithms(base = ""): Promise<string[]> {
  const doc = (await jsonOrThrow(
    await fetch(`${base}/api/algorithms`),
  )) as { algorithms: string[] };
  return doc.algorithms;
}

export async function postEstimate(
  file: Blob,
  params: Record<string, unknown>,
  base = "",
): Promise<EstimateResponse> {
  const form = new FormData();
  form.append("image", file, "upload.png");
  form.append("params", JSON.stringify(params));
  return (await jsonOrThrow(
    await fetch(`${base}/api/estimate`, { method: "POST", body: form }),
  )) as EstimateResponse;
}

export function illusionUrl(
  spec: Record<string, unknown>,
  view: "stimulus" | "target-only" = "stimulus",
  base = "",
): string {
  const q = new URLSearchParams({ spec: JSON.stringify(spec), view });
  return `${base}/api/illusion?${q.toString()}`;
}

export async function postProcess(
  spec: Record<string, unknown>,
  params: Record<string, unknown>,
  base = "",
): Promise<ProcessResponse> {
  return (await jsonOrThrow(
    await fetch(`${base}/api/illusion/process`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ spec, params }),
    }),
  )) as ProcessResponse;
}
