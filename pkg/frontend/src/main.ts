// Bootstrap: rater entry, then the rating session against the hosting service.

import { createApiClient, type FetchLike } from "./api";
import { RatingSession } from "./session";
import { AnnotationApp, renderRaterEntry } from "./ui";

export function startApp(root: HTMLElement, baseUrl = "", fetchFn?: FetchLike): RatingSession[] {
  const sessions: RatingSession[] = [];
  renderRaterEntry(root, (raterId) => {
    const session = new RatingSession(createApiClient(baseUrl, fetchFn), raterId);
    sessions.push(session);
    new AnnotationApp(root, session);
    void session.start();
  });
  return sessions;
}

const mount = document.getElementById("app");
if (mount) {
  startApp(mount, window.location.origin);
}
