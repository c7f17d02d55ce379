/**
 * CSV loading for the percolab result schemas.
 *
 * Only the declared schemas are accepted; a header that does not match one
 * of them exactly is rejected so that renders stay a pure function of
 * well-formed result files.
 */

export type Row = Record<string, string>;

export interface Table {
  schema: SchemaName;
  rows: Row[];
}

export type SchemaName = "bernoulli" | "osss" | "boolean" | "fit" | "exact" | "ppp";

export const SCHEMAS: Record<SchemaName, string[]> = {
  bernoulli: ["model", "d", "n", "p", "estimate", "stderr", "replicas", "seed"],
  osss: [
    "check", "d", "n", "p", "k", "edge", "delta", "inf", "cov",
    "slack_v1", "slack_v2", "verdict",
  ],
  boolean: [
    "model", "d", "lambda", "nu", "r", "stat", "estimate", "stderr",
    "trunc_err", "replicas", "seed",
  ],
  fit: ["fit", "kind", "param", "value", "stderr", "r2"],
  exact: [
    "check", "d", "n", "p", "probability", "derivative", "pivotal_sum",
    "covariance_sum", "residual_pivotal", "residual_covariance", "verdict",
  ],
  ppp: [
    "check", "d", "lambda", "observed", "expected", "sigma", "runs", "seed",
    "verdict",
  ],
};

export class CsvError extends Error {}

/** Parse CSV text: no quoting is used by the writers, so split is enough. */
export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new CsvError("empty CSV: no header");
  }
  const header = lines[0].split(",");
  const schema = matchSchema(header);
  if (schema === null) {
    throw new CsvError(`unknown CSV schema: [${header.join(", ")}]`);
  }
  const rows: Row[] = [];
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    if (parts.length !== header.length) {
      throw new CsvError(`malformed row: ${line}`);
    }
    rows.push(Object.fromEntries(header.map((h, i) => [h, parts[i]])));
  }
  if (rows.length === 0) {
    throw new CsvError("empty CSV: header but no data rows");
  }
  return { schema, rows };
}

function matchSchema(header: string[]): SchemaName | null {
  for (const [name, fields] of Object.entries(SCHEMAS)) {
    if (fields.length === header.length && fields.every((f, i) => f === header[i])) {
      return name as SchemaName;
    }
  }
  return null;
}

export function num(row: Row, field: string): number {
  const v = Number(row[field]);
  if (!Number.isFinite(v)) {
    throw new CsvError(`field ${field} is not a finite number: ${row[field]}`);
  }
  return v;
}

export function requireSchema(table: Table, wanted: SchemaName, kind: string): void {
  if (table.schema !== wanted) {
    throw new CsvError(
      `plot kind ${kind} needs the ${wanted} schema, got ${table.schema}`,
    );
  }
}
