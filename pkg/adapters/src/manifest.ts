import { sha256File, writeFileAtomic } from "./jsonl.js";

export type ArtifactKind = "embeddings" | "probs" | "scores" | "generations";

/** Provenance record written alongside every emitted artifact. */
export interface AdapterManifest {
  artifact_kind: ArtifactKind;
  model_id: string;
  prompt_template: string | null;
  creation_time: string;
  input_path: string;
  input_digest: string;
  output_digest: string;
}

export function writeManifest(
  outPath: string,
  kind: ArtifactKind,
  modelId: string,
  promptTemplate: string | null,
  inputPath: string,
): AdapterManifest {
  const manifest: AdapterManifest = {
    artifact_kind: kind,
    model_id: modelId,
    prompt_template: promptTemplate,
    creation_time: new Date().toISOString(),
    input_path: inputPath,
    input_digest: sha256File(inputPath),
    output_digest: sha256File(outPath),
  };
  writeFileAtomic(`${outPath}.manifest.json`, JSON.stringify(manifest, null, 2) + "\n");
  return manifest;
}
