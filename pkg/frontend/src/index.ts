export * from "./types.js";
export * from "./client.js";
export * from "./jobs.js";
export * from "./session.js";
export * from "./views/dataView.js";
export * from "./views/modelPicker.js";
export * from "./views/testExplorer.js";
export * from "./views/instanceInspector.js";
