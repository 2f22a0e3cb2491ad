import { createHash } from "node:crypto";
import { readFileSync, renameSync, writeFileSync } from "node:fs";

/** Parse a UTF-8 JSON-lines file, skipping blank lines. */
export function readJsonl(path: string): unknown[] {
  const records: unknown[] = [];
  const lines = readFileSync(path, "utf-8").split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    try {
      records.push(JSON.parse(line));
    } catch (err) {
      throw new Error(`${path}:${i + 1}: invalid JSON (${err})`);
    }
  }
  return records;
}

export function toJsonl(records: unknown[]): string {
  return records.map((r) => JSON.stringify(r)).join("\n") + (records.length ? "\n" : "");
}

/**
 * Write a file atomically: the target either keeps its old content or gets
 * the complete new content, never a partial write.
 */
export function writeFileAtomic(path: string, content: string): void {
  const tmp = `${path}.tmp-${process.pid}`;
  writeFileSync(tmp, content, "utf-8");
  renameSync(tmp, path);
}

export function writeJsonlAtomic(path: string, records: unknown[]): void {
  writeFileAtomic(path, toJsonl(records));
}

export function sha256File(path: string): string {
  return createHash("sha256").update(readFileSync(path)).digest("hex");
}
