import { describe, expect, it } from "vitest";

import {
  defaultState,
  fromQuery,
  paramsBody,
  specBody,
  toQuery,
} from "../src/state.js";

describe("state serialization", () => {
  it("defaults survive a round trip", () => {
    const s = defaultState();
    expect(fromQuery(toQuery(s))).toEqual(s);
  });

  it("arbitrary valid states survive a round trip", () => {
    const s = defaultState();
    s.pattern = "ring_lattice";
    s.beta = 16;
    s.sigma = 12;
    s.estimator = "shades-of-gray:p=6";
    s.confidence = "whiteness";
    s.inducerThickness = 5;
    s.inducerFrequency = 9.5;
    s.view = "target-pair";
    s.zoom = 2;
    expect(fromQuery(toQuery(s))).toEqual(s);
  });

  it("empty query yields defaults", () => {
    expect(fromQuery("")).toEqual(defaultState());
  });

  it("out-of-range sliders are clamped", () => {
    const s = fromQuery("beta=1000&sigma=0&zoom=99");
    expect(s.beta).toBe(48);
    expect(s.sigma).toBe(2);
    expect(s.zoom).toBe(8);
  });

  it("garbage values fall back to defaults", () => {
    const s = fromQuery("beta=abc&pattern=nope&view=wat&confidence=maybe");
    expect(s).toEqual(defaultState());
  });

  it("slider at (8, 24) produces the documented request body", () => {
    const s = defaultState();
    s.beta = 8;
    s.sigma = 24;
    const body = paramsBody(s);
    expect(body.beta).toBe(8);
    expect(body.sigma).toBe(24);
    expect(JSON.stringify(body)).toContain('"beta":8');
    expect(JSON.stringify(body)).toContain('"sigma":24');
  });

  it("spec body mirrors the illusion fields", () => {
    const s = defaultState();
    s.pattern = "concentric_disks";
    s.inducerThickness = 4;
    s.inducerFrequency = 6.5;
    expect(specBody(s)).toEqual({
      pattern: "concentric_disks",
      inducer_thickness: 4,
      inducer_frequency: 6.5,
    });
  });
});
