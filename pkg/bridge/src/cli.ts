#!/usr/bin/env node
import { parseArgs } from "node:util";

import { runExport } from "./export.js";

const USAGE =
  "usage: triscore-bridge export --manifest media.tsv --encoder hash-1024 --out emb.blse";

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        manifest: { type: "string" },
        encoder: { type: "string", default: "hash-1024" },
        out: { type: "string" },
      },
    });
  } catch (err) {
    console.error((err as Error).message);
    console.error(USAGE);
    return 2;
  }
  const command = parsed.positionals[0];
  if (command !== "export") {
    console.error(USAGE);
    return 2;
  }
  const { manifest, encoder, out } = parsed.values;
  if (!manifest || !out) {
    console.error("--manifest and --out are required");
    console.error(USAGE);
    return 2;
  }
  try {
    const result = runExport(manifest, encoder as string, out);
    console.log(`wrote ${result.count} x ${result.dim} embeddings to ${out}`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

process.exit(main(process.argv.slice(2)));
