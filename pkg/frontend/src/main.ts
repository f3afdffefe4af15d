import { ApiClient } from "./api";
import { Editor } from "./editor";

function requireElement<T extends HTMLElement>(id: string): T {
  const element = document.getElementById(id);
  if (!element) throw new Error(`missing #${id}`);
  return element as T;
}

window.addEventListener("DOMContentLoaded", () => {
  const baseUrlInput = requireElement<HTMLInputElement>("base-url");
  const sourceLangInput = requireElement<HTMLInputElement>("source-lang");
  const targetLangInput = requireElement<HTMLInputElement>("target-lang");

  const api = new ApiClient(
    baseUrlInput.value.replace(/\/$/, ""),
    undefined,
    sourceLangInput.value.trim() || "auto",
    targetLangInput.value.trim() || "en"
  );
  const applyConfig = () => {
    api.setBaseUrl(baseUrlInput.value);
    api.setLanguages(sourceLangInput.value.trim() || "auto",
                     targetLangInput.value.trim() || "en");
  };
  for (const input of [baseUrlInput, sourceLangInput, targetLangInput]) {
    input.addEventListener("change", applyConfig);
  }

  new Editor(
    {
      source: requireElement<HTMLTextAreaElement>("source"),
      translateButton: requireElement<HTMLButtonElement>("translate"),
      target: requireElement<HTMLElement>("target"),
      dropdown: requireElement<HTMLElement>("dropdown"),
      typedInput: requireElement<HTMLInputElement>("typed"),
      ghost: requireElement<HTMLElement>("ghost"),
      status: requireElement<HTMLElement>("status"),
    },
    api
  );
});
