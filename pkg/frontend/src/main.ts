/**
 * Page bootstrap: mount the explorer chrome and, when the page URL carries
 * a ?report= query parameter, load that same-origin report file.
 *
 * The app is a static bundle; the only request it ever makes is for a
 * relative report path named in the URL, served by whatever static server
 * hosts the bundle itself. Absolute URLs are rejected.
 */
import { mountExplorer, loadReportText, showError } from "./view.js";

function relativeReportPath(): string | null {
  const path = new URLSearchParams(window.location.search).get("report");
  if (path === null || path === "") {
    return null;
  }
  if (/^[a-z][a-z0-9+.-]*:/i.test(path) || path.startsWith("//")) {
    return null;
  }
  return path;
}

export function start(root: HTMLElement): void {
  mountExplorer(root);
  const path = relativeReportPath();
  if (path !== null) {
    fetch(path)
      .then((response) => {
        if (!response.ok) {
          throw new Error(`${response.status} ${response.statusText}`);
        }
        return response.text();
      })
      .then((text) => loadReportText(root, text))
      .catch((err: Error) => {
        showError(root, `could not load ${path}: ${err.message}`);
      });
  }
}

if (typeof document !== "undefined" && document.getElementById("app") !== null) {
  start(document.getElementById("app") as HTMLElement);
}
