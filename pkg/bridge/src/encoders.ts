/**
 * Encoder registry. Encoders are opaque to the bridge: anything that maps a
 * manifest item to a fixed-dimension vector can be registered. No model
 * weights ship with this package; the built-in "hash-1024" encoder derives a
 * deterministic pseudo-embedding from the content bytes so the export path
 * and the file contract can be exercised offline.
 */

import { createHash } from "node:crypto";
import { existsSync, readFileSync } from "node:fs";

import type { MediaItem } from "./manifest.js";

export interface Encoder {
  id: string;
  dim: number;
  encode(item: MediaItem): Float32Array;
}

function contentBytes(item: MediaItem): Buffer {
  if (item.kind === "audio_path") {
    if (!existsSync(item.content)) {
      throw new Error(`item ${JSON.stringify(item.id)}: audio file not found: ${item.content}`);
    }
    return readFileSync(item.content);
  }
  return Buffer.from(item.content, "utf-8");
}

/** Deterministic hash-derived vectors in [-1, 1); same input, same output. */
export function hashEncoder(dim = 1024): Encoder {
  return {
    id: `hash-${dim}`,
    dim,
    encode(item: MediaItem): Float32Array {
      const seed = createHash("sha256")
        .update(item.modality)
        .update("\0")
        .update(item.lang)
        .update("\0")
        .update(contentBytes(item))
        .digest();
      const out = new Float32Array(dim);
      let filled = 0;
      for (let block = 0; filled < dim; block++) {
        const counter = Buffer.alloc(4);
        counter.writeUInt32BE(block, 0);
        const bytes = createHash("sha256").update(seed).update(counter).digest();
        for (let j = 0; j < 8 && filled < dim; j++) {
          const u = bytes.readUInt32LE(j * 4);
          out[filled++] = Math.fround((u / 2 ** 32) * 2 - 1);
        }
      }
      return out;
    },
  };
}

const registry = new Map<string, () => Encoder>([["hash-1024", () => hashEncoder(1024)]]);

export function registerEncoder(id: string, factory: () => Encoder): void {
  registry.set(id, factory);
}

export function availableEncoders(): string[] {
  return [...registry.keys()].sort();
}

export function getEncoder(id: string): Encoder {
  const factory = registry.get(id);
  if (!factory) {
    throw new Error(
      `encoder ${JSON.stringify(id)} is not available locally ` +
        `(known: ${availableEncoders().join(", ")})`,
    );
  }
  return factory();
}
