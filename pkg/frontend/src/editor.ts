import { ApiClient, Suggestion } from "./api";
import { debounce } from "./debounce";

// One editing session: a source sentence, the current translation as a list
// of words, and the interaction state around the caret. Only the response
// to the most recently issued request may mutate this state; anything
// slower is stale and dropped.

export interface EditorState {
  sourceText: string;
  words: string[];
  caret: number;
  typedBuffer: string;
  suggestions: Suggestion[];
  ghostWord: string | null;
  requestInFlight: boolean;
}

export interface EditorElements {
  source: HTMLTextAreaElement;
  translateButton: HTMLElement;
  target: HTMLElement;
  dropdown: HTMLElement;
  typedInput: HTMLInputElement;
  ghost: HTMLElement;
  status: HTMLElement;
}

export const DEBOUNCE_MS = 150;
export const MAX_DROPDOWN_ENTRIES = 10;

export class Editor {
  readonly state: EditorState = {
    sourceText: "",
    words: [],
    caret: 0,
    typedBuffer: "",
    suggestions: [],
    ghostWord: null,
    requestInFlight: false,
  };

  private requestCounter = 0;
  private latestRequestId = 0;
  private debouncedComplete: () => void;

  constructor(
    private elements: EditorElements,
    private api: ApiClient,
    debounceMs: number = DEBOUNCE_MS
  ) {
    this.debouncedComplete = debounce(() => {
      void this.requestCompletion();
    }, debounceMs);
    elements.translateButton.addEventListener("click", () => {
      void this.translate();
    });
    elements.typedInput.addEventListener("input", () => {
      this.onTypedChars(elements.typedInput.value.trim());
    });
    elements.typedInput.addEventListener("keydown", (event) => {
      if (event.key === "Enter" || event.key === "Tab") {
        event.preventDefault();
        this.acceptGhost();
      } else if (event.key === "Escape") {
        this.dismissGhost();
      }
    });
  }

  private nextRequestId(): number {
    this.requestCounter += 1;
    this.latestRequestId = this.requestCounter;
    return this.requestCounter;
  }

  private isCurrent(requestId: number): boolean {
    return requestId === this.latestRequestId;
  }

  async translate(): Promise<void> {
    const text = this.elements.source.value.trim();
    if (!text) return;
    this.state.sourceText = text;
    const requestId = this.nextRequestId();
    this.state.requestInFlight = true;
    this.setStatus("translating…");
    try {
      const response = await this.api.translate(text);
      if (!this.isCurrent(requestId)) return;
      this.state.words = response.translations[0].split(/\s+/).filter(Boolean);
      this.state.caret = this.state.words.length;
      this.state.suggestions = [];
      this.clearGhost();
      this.renderWords();
      this.renderDropdown();
      this.setStatus("");
    } catch (error) {
      if (this.isCurrent(requestId)) this.setStatus(`translation failed: ${error}`);
    } finally {
      if (this.isCurrent(requestId)) this.state.requestInFlight = false;
    }
  }

  // Clicking word i asks for alternatives for that position: the prefix is
  // everything before it, and a chosen suggestion replaces the word and the
  // whole tail after it.
  async onWordClick(position: number): Promise<void> {
    this.state.caret = position;
    const prefix = this.state.words.slice(0, position).join(" ");
    const requestId = this.nextRequestId();
    this.state.requestInFlight = true;
    this.setStatus("fetching suggestions…");
    try {
      const response = await this.api.suggest(this.state.sourceText, prefix);
      if (!this.isCurrent(requestId)) return;
      this.state.suggestions = response.result.translations.slice(
        0,
        MAX_DROPDOWN_ENTRIES
      );
      this.renderDropdown();
      this.setStatus("");
    } catch (error) {
      if (!this.isCurrent(requestId)) return;
      this.renderRetry(position, String(error));
    } finally {
      if (this.isCurrent(requestId)) this.state.requestInFlight = false;
    }
  }

  selectSuggestion(index: number): void {
    const entry = this.state.suggestions[index];
    if (!entry) return;
    const kept = this.state.words.slice(0, this.state.caret);
    const tail = entry.completion.split(/\s+/).filter(Boolean);
    this.state.words = [...kept, entry.suggestion, ...tail];
    this.state.caret = this.state.words.length;
    this.state.suggestions = [];
    this.renderWords();
    this.renderDropdown();
  }

  onTypedChars(chars: string): void {
    this.state.typedBuffer = chars;
    this.clearGhost();
    if (chars) this.debouncedComplete();
  }

  private async requestCompletion(): Promise<void> {
    const typed = this.state.typedBuffer;
    if (!typed) return;
    const left = this.state.words.slice(0, this.state.caret).join(" ");
    const right = this.state.words.slice(this.state.caret).join(" ");
    const requestId = this.nextRequestId();
    this.state.requestInFlight = true;
    try {
      const response = await this.api.complete(
        this.state.sourceText,
        left,
        right,
        typed
      );
      if (!this.isCurrent(requestId)) return;
      if (
        response.word &&
        response.word.startsWith(this.state.typedBuffer) &&
        response.word.length > this.state.typedBuffer.length
      ) {
        this.state.ghostWord = response.word;
        this.elements.ghost.textContent = response.word.slice(
          this.state.typedBuffer.length
        );
      } else {
        this.clearGhost();
      }
    } catch (error) {
      if (this.isCurrent(requestId)) this.setStatus(`completion failed: ${error}`);
    } finally {
      if (this.isCurrent(requestId)) this.state.requestInFlight = false;
    }
  }

  acceptGhost(): void {
    if (!this.state.ghostWord) return;
    const kept = this.state.words.slice(0, this.state.caret);
    const tail = this.state.words.slice(this.state.caret);
    this.state.words = [...kept, this.state.ghostWord, ...tail];
    this.state.caret += 1;
    this.state.typedBuffer = "";
    this.elements.typedInput.value = "";
    this.clearGhost();
    this.renderWords();
  }

  dismissGhost(): void {
    this.clearGhost();
  }

  private clearGhost(): void {
    this.state.ghostWord = null;
    this.elements.ghost.textContent = "";
  }

  private setStatus(text: string): void {
    this.elements.status.textContent = text;
  }

  private renderWords(): void {
    const target = this.elements.target;
    target.textContent = "";
    this.state.words.forEach((word, index) => {
      const span = document.createElement("span");
      span.className = "word";
      span.dataset.index = String(index);
      span.textContent = word;
      span.addEventListener("click", () => {
        void this.onWordClick(index);
      });
      target.appendChild(span);
      target.appendChild(document.createTextNode(" "));
    });
  }

  private renderDropdown(): void {
    const dropdown = this.elements.dropdown;
    dropdown.textContent = "";
    dropdown.hidden = this.state.suggestions.length === 0;
    this.state.suggestions.forEach((entry, index) => {
      const item = document.createElement("li");
      item.className = "suggestion";
      const word = document.createElement("span");
      word.className = "suggestion-word";
      word.textContent = entry.suggestion;
      const completion = document.createElement("span");
      completion.className = "suggestion-completion";
      completion.textContent = entry.completion;
      item.appendChild(word);
      item.appendChild(completion);
      item.addEventListener("click", () => this.selectSuggestion(index));
      dropdown.appendChild(item);
    });
  }

  // Network failures keep the editor text untouched and offer a retry.
  private renderRetry(position: number, message: string): void {
    const dropdown = this.elements.dropdown;
    dropdown.textContent = "";
    dropdown.hidden = false;
    const item = document.createElement("li");
    item.className = "retry";
    item.textContent = `suggestions unavailable – retry (${message})`;
    item.addEventListener("click", () => {
      void this.onWordClick(position);
    });
    dropdown.appendChild(item);
  }
}
