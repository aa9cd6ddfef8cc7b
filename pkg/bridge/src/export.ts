import { writeFileSync } from "node:fs";

import { writeBlse } from "./blse.js";
import { getEncoder } from "./encoders.js";
import { loadManifest } from "./manifest.js";

export interface ExportResult {
  dim: number;
  count: number;
}

/**
 * Embed every manifest item in order and write the result as one BLSE file.
 * Row i of the output corresponds to line i of the manifest.
 */
export function runExport(manifestPath: string, encoderId: string, outPath: string): ExportResult {
  const items = loadManifest(manifestPath);
  const encoder = getEncoder(encoderId);
  const rows = items.map((item) => {
    const vec = encoder.encode(item);
    if (vec.length !== encoder.dim) {
      throw new Error(
        `encoder ${encoder.id} returned dim ${vec.length} for ${JSON.stringify(item.id)}, expected ${encoder.dim}`,
      );
    }
    return vec;
  });
  writeFileSync(outPath, writeBlse(rows, encoder.dim));
  return { dim: encoder.dim, count: rows.length };
}
