import { describe, expect, it } from "vitest";

import { plasma, plasmaCss } from "../src/colormap.js";

describe("plasma ramp", () => {
  it("matches the anchor colors at the endpoints", () => {
    expect(plasma(0)).toEqual([13, 8, 135]);
    expect(plasma(1)).toEqual([240, 249, 33]);
  });

  it("clamps out-of-range inputs", () => {
    expect(plasma(-5)).toEqual(plasma(0));
    expect(plasma(7)).toEqual(plasma(1));
  });

  it("stays inside RGB bounds and moves smoothly", () => {
    let prev = plasma(0);
    for (let i = 1; i <= 100; i++) {
      const c = plasma(i / 100);
      for (const ch of c) {
        expect(ch).toBeGreaterThanOrEqual(0);
        expect(ch).toBeLessThanOrEqual(255);
      }
      const jump = Math.max(
        Math.abs(c[0] - prev[0]),
        Math.abs(c[1] - prev[1]),
        Math.abs(c[2] - prev[2]),
      );
      expect(jump).toBeLessThan(12);
      prev = c;
    }
  });

  it("runs dark blue to bright yellow", () => {
    // red climbs through the body of the ramp (it dips a touch at the top)
    let prev = -1;
    for (let i = 0; i <= 9; i++) {
      const [r] = plasma(i / 10);
      expect(r).toBeGreaterThanOrEqual(prev);
      prev = r;
    }
    const [r0, g0] = plasma(0);
    const [r1, g1] = plasma(1);
    expect(r1).toBeGreaterThan(r0);
    expect(g1).toBeGreaterThan(g0);
  });

  it("renders a css color string", () => {
    expect(plasmaCss(0)).toBe("rgb(13,8,135)");
  });
});
