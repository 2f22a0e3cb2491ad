import { execFileSync } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { toJsonl } from "../src/jsonl.js";
import type { InstanceRecord } from "../src/schemas.js";

export function tempDir(): string {
  return mkdtempSync(join(tmpdir(), "adapters-"));
}

export function makeInstances(count: number, withExplanations = true): InstanceRecord[] {
  const labels = ["entailment", "neutral", "contradiction"];
  return Array.from({ length: count }, (_, i) => ({
    id: `inst-${String(i).padStart(3, "0")}`,
    dataset: "fixture",
    split: "train",
    hypothesis: `hypothesis number ${i}`,
    premise: `premise number ${i}`,
    label: labels[i % 3],
    ...(withExplanations ? { explanation: `because of reason ${i}` } : {}),
  }));
}

export function writeInstances(dir: string, records: InstanceRecord[], name = "instances.jsonl"): string {
  const path = join(dir, name);
  writeFileSync(path, toJsonl(records), "utf-8");
  return path;
}

/**
 * Run the evaluation toolkit's schema checker over an artifact file;
 * throws (non-zero exit) if the file is not schema-conformant.
 */
export function validateWithToolkit(path: string, kind: string): string {
  return execFileSync("python3", ["-m", "oodeval.cli", "ingest", path, "--kind", kind], {
    encoding: "utf-8",
  });
}
