import { readFileSync } from "node:fs";

export interface ScanCsv {
  path: string;
  /** `# config:`-echoed parameters and other header metadata */
  header: Record<string, string>;
  columns: string[];
  x: number[];
  y: number[];
}

export class CsvError extends Error {}

/**
 * Parse an eitbiphoton scan CSV: `#` header lines carrying the parameter
 * echo, then comma-separated data rows (column 1 abscissa, column 2 value).
 * Rows are kept in file order and never filtered; malformed content is a
 * hard error naming the file.
 */
export function parseScanCsv(path: string): ScanCsv {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new CsvError(`cannot read CSV file: ${path}`);
  }
  const header: Record<string, string> = {};
  let columns: string[] = [];
  const x: number[] = [];
  const y: number[] = [];
  for (const rawLine of text.split("\n")) {
    const line = rawLine.trimEnd();
    if (line === "") continue;
    if (line.startsWith("#")) {
      let body = line.slice(1).trim();
      if (body.startsWith("config:")) body = body.slice("config:".length).trim();
      const eq = body.indexOf("=");
      if (eq > 0) {
        header[body.slice(0, eq).trim()] = body.slice(eq + 1).trim();
      }
      if (body.startsWith("columns")) {
        columns = body
          .slice(body.indexOf("=") + 1)
          .split(",")
          .map((c) => c.trim());
      }
      continue;
    }
    const parts = line.split(",");
    if (parts.length < 2) {
      throw new CsvError(`${path}: data row has fewer than 2 columns: "${line}"`);
    }
    const xv = Number(parts[0]);
    const yv = Number(parts[1]);
    if (!Number.isFinite(xv) || !Number.isFinite(yv)) {
      throw new CsvError(`${path}: non-numeric data row: "${line}"`);
    }
    x.push(xv);
    y.push(yv);
  }
  if (x.length === 0) {
    throw new CsvError(`${path}: no data rows`);
  }
  if (columns.length < 2) {
    throw new CsvError(`${path}: header does not declare the two mandatory columns`);
  }
  return { path, header, columns, x, y };
}
