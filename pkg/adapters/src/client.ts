/** Transport to an external model service. */
export interface ModelClient {
  /** Embed a batch of texts into fixed-dimension vectors. */
  embed(texts: string[]): Promise<number[][]>;
  /** Score a batch of prompts with a named scorer. */
  score(prompts: string[], scorer: string): Promise<number[]>;
  /** Complete a batch of prompts, returning raw generated text. */
  generate(prompts: string[]): Promise<string[]>;
}

/**
 * JSON-over-HTTP client. The endpoint exposes POST /embed, /score and
 * /generate, each taking and returning a JSON body with parallel arrays.
 */
export function httpClient(endpoint: string): ModelClient {
  async function post<T>(path: string, body: unknown): Promise<T> {
    const res = await fetch(`${endpoint}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) {
      throw new Error(`${path}: endpoint returned ${res.status}`);
    }
    return (await res.json()) as T;
  }

  return {
    async embed(texts) {
      const { vectors } = await post<{ vectors: number[][] }>("/embed", { texts });
      return vectors;
    },
    async score(prompts, scorer) {
      const { values } = await post<{ values: number[] }>("/score", { prompts, scorer });
      return values;
    },
    async generate(prompts) {
      const { texts } = await post<{ texts: string[] }>("/generate", { prompts });
      return texts;
    },
  };
}
