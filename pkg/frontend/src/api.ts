// Thin typed client for the wlac service. Only the documented endpoints
// are used; the base URL is configurable so the editor can run same-origin
// or against a dev server.

export interface Suggestion {
  suggestion: string;
  completion: string;
}

export interface TranslateResponse {
  id: number;
  source_lang: string;
  target_lang: string;
  translations: string[];
}

export interface SuggestResponse {
  id: number;
  source_lang: string;
  target_lang: string;
  result: { translations: Suggestion[] };
}

export interface CompleteResponse {
  id: number;
  word: string | null;
  runs_used: number;
}

export type FetchFn = typeof fetch;

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchFn = (...args) => fetch(...args),
    private sourceLanguage = "auto",
    private targetLanguage = "en"
  ) {}

  setBaseUrl(url: string): void {
    this.baseUrl = url.replace(/\/$/, "");
  }

  setLanguages(source: string, target: string): void {
    this.sourceLanguage = source;
    this.targetLanguage = target;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      throw new Error(`${path} failed: HTTP ${response.status}`);
    }
    return (await response.json()) as T;
  }

  translate(sentence: string): Promise<TranslateResponse> {
    return this.post<TranslateResponse>("/translate", {
      sentences: [sentence],
      source_language: this.sourceLanguage,
      target_language: this.targetLanguage,
    });
  }

  suggest(sentence: string, prefix: string): Promise<SuggestResponse> {
    return this.post<SuggestResponse>("/suggest", {
      sentence,
      prefix,
      source_language: this.sourceLanguage,
      target_language: this.targetLanguage,
    });
  }

  complete(
    source: string,
    leftContext: string,
    rightContext: string,
    typed: string
  ): Promise<CompleteResponse> {
    return this.post<CompleteResponse>("/complete", {
      source,
      left_context: leftContext,
      right_context: rightContext,
      typed,
      source_language: this.sourceLanguage,
      target_language: this.targetLanguage,
    });
  }
}
