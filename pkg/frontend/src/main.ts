/** Browser entry point; tests drive App directly instead of importing this. */

import { api } from "./api.js";
import { App } from "./app.js";

const mount = document.getElementById("app");
if (mount) {
  const app = new App(api, mount);
  void app.boot();
}
