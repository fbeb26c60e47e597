import { ApiClient } from "./api.js";
import { App } from "./app.js";

function required(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id} in index.html`);
  }
  return node;
}

const app = new App(
  new ApiClient(""),
  required("view"),
  required("banner"),
  required("controls"),
);
void app.start();
