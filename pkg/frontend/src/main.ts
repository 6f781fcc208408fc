import { RecorderApp } from "./render.js";

const app = new RecorderApp(document);
// render the bundled default map immediately so the page is usable
// without loading any files
app.load();
