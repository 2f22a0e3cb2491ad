#!/usr/bin/env node
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { httpClient } from "./client.js";
import { embedFile } from "./embed.js";
import { generateFile } from "./generate.js";
import { writeLoraConfig } from "./lora.js";
import { scoreFile } from "./score.js";
import type { ScorerName } from "./prompts.js";
import type { TemplateName } from "./schemas.js";

function endpointFrom(flag: string | undefined): string {
  const endpoint = flag ?? process.env.ADAPTER_ENDPOINT;
  if (!endpoint) {
    throw new Error("no model endpoint: pass --endpoint or set ADAPTER_ENDPOINT");
  }
  return endpoint;
}

export async function main(argv: string[]): Promise<number> {
  try {
    await yargs(argv)
      .scriptName("oodeval-adapters")
      .option("endpoint", { type: "string", describe: "model service base URL" })
      .command(
        "embed",
        "write an embeddings file for an instance file",
        (y) =>
          y
            .option("in", { type: "string", demandOption: true })
            .option("out", { type: "string", demandOption: true })
            .option("model-id", { type: "string", demandOption: true }),
        async (args) => {
          const client = httpClient(endpointFrom(args.endpoint));
          const manifest = await embedFile(args.in, args.out, client, args["model-id"]);
          console.log(`wrote ${args.out} (digest ${manifest.output_digest.slice(0, 12)})`);
        },
      )
      .command(
        "score",
        "score explanations with acceptability or themis",
        (y) =>
          y
            .option("in", { type: "string", demandOption: true })
            .option("out", { type: "string", demandOption: true })
            .option("scorer", {
              choices: ["acceptability", "themis"] as const,
              demandOption: true,
            })
            .option("model-id", { type: "string", demandOption: true }),
        async (args) => {
          const client = httpClient(endpointFrom(args.endpoint));
          const result = await scoreFile(
            args.in,
            args.out,
            client,
            args.scorer as ScorerName,
            args["model-id"],
          );
          console.log(`scored ${result.scored} instances, ${result.errors.length} skipped`);
        },
      )
      .command(
        "generate",
        "run prompts through a fine-tuned model, resumably",
        (y) =>
          y
            .option("in", { type: "string", demandOption: true })
            .option("out", { type: "string", demandOption: true })
            .option("template", {
              choices: ["nli_template", "json_template"] as const,
              demandOption: true,
            })
            .option("model-id", { type: "string", demandOption: true }),
        async (args) => {
          const client = httpClient(endpointFrom(args.endpoint));
          await generateFile(
            args.in,
            args.out,
            client,
            args.template as TemplateName,
            args["model-id"],
          );
          console.log(`wrote ${args.out}`);
        },
      )
      .command(
        "lora-config",
        "emit a fine-tuning config with the standard LoRA defaults",
        (y) =>
          y
            .option("base-model", { type: "string", demandOption: true })
            .option("train-file", { type: "string", demandOption: true })
            .option("out", { type: "string", demandOption: true }),
        (args) => {
          writeLoraConfig(args.out, args["base-model"], args["train-file"]);
          console.log(`wrote ${args.out}`);
        },
      )
      .demandCommand(1)
      .strict()
      .fail((msg, err) => {
        throw err ?? new Error(msg);
      })
      .parseAsync();
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  main(hideBin(process.argv)).then((code) => process.exit(code));
}
