// Bootstrap: wire the controller to the page. The API base URL can be
// overridden with ?api=http://host:port for non-default service ports.

import { ApiClient } from "./api.js";
import { render } from "./render.js";
import { WizardController } from "./wizard.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? "http://127.0.0.1:8714";

const controller = new WizardController(new ApiClient(baseUrl));
const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
controller.subscribe(() => render(root, controller));
render(root, controller);
