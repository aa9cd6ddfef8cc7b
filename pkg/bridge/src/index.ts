export { writeBlse, readBlse, MAGIC, VERSION, HEADER_SIZE } from "./blse.js";
export type { BlseContents } from "./blse.js";
export { parseManifest, loadManifest } from "./manifest.js";
export type { MediaItem, MediaKind, Modality } from "./manifest.js";
export { getEncoder, registerEncoder, availableEncoders, hashEncoder } from "./encoders.js";
export type { Encoder } from "./encoders.js";
export { runExport } from "./export.js";
export type { ExportResult } from "./export.js";
