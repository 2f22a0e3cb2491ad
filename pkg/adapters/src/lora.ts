import { writeFileAtomic } from "./jsonl.js";

/**
 * Optional helper: emit a fine-tuning config with the project's standard
 * LoRA defaults. Training itself runs elsewhere; nothing in the toolkit
 * depends on this file.
 */
export interface LoraConfig {
  base_model: string;
  train_file: string;
  r: number;
  alpha: number;
  learning_rate: number;
  optimizer: string;
  epochs: number;
}

export function loraConfig(baseModel: string, trainFile: string): LoraConfig {
  return {
    base_model: baseModel,
    train_file: trainFile,
    r: 16,
    alpha: 16,
    learning_rate: 2e-4,
    optimizer: "paged_adamw_32bit",
    epochs: 50,
  };
}

export function writeLoraConfig(path: string, baseModel: string, trainFile: string): LoraConfig {
  const config = loraConfig(baseModel, trainFile);
  writeFileAtomic(path, JSON.stringify(config, null, 2) + "\n");
  return config;
}
