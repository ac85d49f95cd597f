/**
 * Deterministic SVG rendering of decay ladders.
 *
 * Server-side echarts with animations off: the same table always renders
 * to the identical SVG string, with the requested pixel dimensions in the
 * <svg> width/height attributes.
 */

import * as echarts from "echarts";

import { groupSeries, LadderTable } from "./ladder";

export interface RenderOptions {
  logY?: boolean;
  width?: number;
  height?: number;
  title?: string;
}

export function renderLadderSvg(table: LadderTable, opts: RenderOptions = {}): string {
  const width = opts.width ?? 800;
  const height = opts.height ?? 520;
  const groups = groupSeries(table);

  const series = groups.map((g) => ({
    name: g.name,
    type: "line" as const,
    data: g.points.map((p) => [p.H, p.value]),
    symbol: g.baseline ? "none" : "circle",
    symbolSize: 7,
    lineStyle: g.baseline ? { type: "dashed" as const, width: 1.5 } : { width: 2.5 },
  }));

  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width,
    height,
  });
  chart.setOption({
    animation: false,
    title: { text: opts.title ?? "short-interval decay", left: "center" },
    legend: { bottom: 0, data: groups.map((g) => g.name) },
    grid: { left: 70, right: 30, top: 50, bottom: 70 },
    xAxis: {
      type: "log",
      name: "H",
      nameLocation: "middle",
      nameGap: 30,
      minorSplitLine: { show: true },
    },
    yAxis: {
      type: opts.logY ? "log" : "value",
      name: "A(f, M, H)",
      nameLocation: "middle",
      nameGap: 50,
    },
    series,
  });
  const svg = chart.renderToSVGString();
  chart.dispose();
  return normalizeGeneratedIds(svg);
}

/**
 * zrender names classes and clip-path ids with a process-global instance
 * counter (zr0-cls-3, zr1-c0, ...), so repeated renders in one process
 * differ in those tokens alone. Renumber them in first-appearance order to
 * make equal inputs yield byte-identical SVG.
 */
export function normalizeGeneratedIds(svg: string): string {
  const mapping = new Map<string, string>();
  let clsCount = 0;
  let clipCount = 0;
  return svg.replace(/zr\d+-(cls|c)-?(\d+)/g, (token, kind) => {
    let out = mapping.get(token);
    if (out === undefined) {
      out =
        kind === "cls" ? `zr-cls-${clsCount++}` : `zr-c${clipCount++}`;
      mapping.set(token, out);
    }
    return out;
  });
}

/** Pixel dimensions recorded in an SVG string's root element. */
export function svgDimensions(svg: string): { width: number; height: number } {
  const m = svg.match(/<svg[^>]*width="(\d+)"[^>]*height="(\d+)"/);
  if (!m) {
    throw new Error("no width/height attributes found in SVG");
  }
  return { width: Number(m[1]), height: Number(m[2]) };
}
