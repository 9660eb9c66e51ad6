import { ApiClient } from "./api.js";
import { createExplorer } from "./app.js";

const root = document.getElementById("app");
if (root) {
  createExplorer(root, new ApiClient(""));
}
