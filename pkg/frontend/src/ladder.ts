/**
 * Parsing and validation of harness ladder CSVs.
 *
 * Contract (produced by `nilorth run`): a header row `statistic,M,H,value`
 * followed by data rows; M and H are positive integers, value a finite
 * float. Rows whose statistic ends in `_baseline` carry the random-phase
 * reference level for the matching experiment rows.
 */

export interface LadderRow {
  statistic: string;
  M: number;
  H: number;
  value: number;
}

export interface LadderTable {
  rows: LadderRow[];
}

export interface SeriesGroup {
  name: string;
  baseline: boolean;
  /** points sorted by H ascending */
  points: Array<{ H: number; value: number }>;
}

export class SchemaError extends Error {}

const HEADER = "statistic,M,H,value";

export function parseLadderCsv(text: string): LadderTable {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty file");
  }
  if (lines[0] !== HEADER) {
    throw new SchemaError(
      `bad header: expected "${HEADER}", got "${lines[0]}"`,
    );
  }
  const rows: LadderRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== 4) {
      throw new SchemaError(`line ${i + 1}: expected 4 columns, got ${parts.length}`);
    }
    const [statistic, mRaw, hRaw, vRaw] = parts;
    const M = Number(mRaw);
    const H = Number(hRaw);
    const value = Number(vRaw);
    if (!Number.isInteger(M) || M < 1 || !Number.isInteger(H) || H < 1) {
      throw new SchemaError(`line ${i + 1}: M and H must be positive integers`);
    }
    if (!Number.isFinite(value)) {
      throw new SchemaError(`line ${i + 1}: value must be finite`);
    }
    rows.push({ statistic, M, H, value });
  }
  if (rows.length === 0) {
    throw new SchemaError("no data rows");
  }
  return { rows };
}

/** Group rows by statistic, baselines flagged, points sorted by H. */
export function groupSeries(table: LadderTable): SeriesGroup[] {
  const byName = new Map<string, LadderRow[]>();
  for (const row of table.rows) {
    const bucket = byName.get(row.statistic);
    if (bucket) {
      bucket.push(row);
    } else {
      byName.set(row.statistic, [row]);
    }
  }
  const groups: SeriesGroup[] = [];
  for (const [name, rows] of byName) {
    const points = rows
      .map((r) => ({ H: r.H, value: r.value }))
      .sort((a, b) => a.H - b.H);
    groups.push({ name, baseline: name.endsWith("_baseline"), points });
  }
  // deterministic order: experiment curves first, then baselines, each sorted
  groups.sort((a, b) =>
    a.baseline === b.baseline ? a.name.localeCompare(b.name) : a.baseline ? 1 : -1,
  );
  return groups;
}
