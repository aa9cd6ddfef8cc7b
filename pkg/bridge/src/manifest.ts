/**
 * Media manifest: one tab-separated line per item to embed.
 *
 *   id <TAB> kind <TAB> content <TAB> lang <TAB> modality
 *
 * kind is "audio_path" (content is a file path) or "text" (content is the
 * sentence itself). Audio items carry the "speech" modality, text items
 * "text"; audio paths are checked for existence at export time, not here.
 */

import { readFileSync } from "node:fs";

export type MediaKind = "audio_path" | "text";
export type Modality = "speech" | "text";

export interface MediaItem {
  id: string;
  kind: MediaKind;
  content: string;
  lang: string;
  modality: Modality;
}

const KIND_MODALITY: Record<MediaKind, Modality> = {
  audio_path: "speech",
  text: "text",
};

export function parseManifest(text: string): MediaItem[] {
  const items: MediaItem[] = [];
  const seen = new Set<string>();
  const lines = text.split("\n");
  lines.forEach((line, index) => {
    if (line.trim() === "") return;
    const lineno = index + 1;
    const parts = line.split("\t");
    if (parts.length !== 5) {
      throw new Error(`line ${lineno}: expected 5 tab-separated fields, got ${parts.length}`);
    }
    const [id, kind, content, lang, modality] = parts.map((p) => p.trim());
    if (id === "") {
      throw new Error(`line ${lineno}: empty id`);
    }
    if (seen.has(id)) {
      throw new Error(`line ${lineno}: duplicate id ${JSON.stringify(id)}`);
    }
    seen.add(id);
    if (kind !== "audio_path" && kind !== "text") {
      throw new Error(`line ${lineno}: kind must be audio_path or text, got ${JSON.stringify(kind)}`);
    }
    if (modality !== "speech" && modality !== "text") {
      throw new Error(`line ${lineno}: modality must be speech or text, got ${JSON.stringify(modality)}`);
    }
    if (KIND_MODALITY[kind] !== modality) {
      throw new Error(`line ${lineno}: kind ${kind} implies modality ${KIND_MODALITY[kind]}, got ${modality}`);
    }
    items.push({ id, kind, content, lang, modality });
  });
  return items;
}

export function loadManifest(path: string): MediaItem[] {
  return parseManifest(readFileSync(path, "utf-8"));
}
