import { ApiClient } from "./api.js";
import { ReviewController, type ReviewView } from "./controller.js";
import { MemoryStorage, OfflineQueue } from "./offline.js";
import type { Candidate, CandidateList, Progress, ResearcherRow } from "./types.js";

// DOM elements
const queueList = document.getElementById("queue-list")!;
const candidatePane = document.getElementById("candidate-pane")!;
const progressBar = document.getElementById("progress-bar")!;
const progressLabel = document.getElementById("progress-label")!;
const offlineBadge = document.getElementById("offline-badge")!;
const toast = document.getElementById("toast")!;
const retryButton = document.getElementById("retry-queued") as HTMLButtonElement;

let toastTimer: ReturnType<typeof setTimeout> | null = null;

// the server can require a bearer token; pass it as #token=... once and
// it sticks for the session
function resolveToken(): string {
  const match = /[#&]token=([^&]+)/.exec(window.location.hash);
  if (match && match[1]) {
    window.sessionStorage.setItem("byline.token", decodeURIComponent(match[1]));
    window.location.hash = "";
  }
  return window.sessionStorage.getItem("byline.token") ?? "";
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

function field(label: string, value: string): string {
  if (!value) {
    return "";
  }
  return `<div class="field"><span class="field-label">${label}</span>${escapeHtml(value)}</div>`;
}

function candidateCard(candidate: Candidate, active: boolean): string {
  const verdictClass = candidate.verdict ? ` ${candidate.verdict}` : "";
  const badges = [
    candidate.verdict ? `<span class="badge verdict">${candidate.verdict}</span>` : "",
    candidate.conflict ? `<span class="badge conflict">claimed twice</span>` : "",
  ].join("");
  const alternatives = [
    field("also as", candidate.alternative_full_name),
    field("alt first name", candidate.alternative_first_name),
    field("alt e-mail", candidate.alternative_email),
    field("alt organization", candidate.alternative_address_organization),
    field(
      "alt place",
      [candidate.alternative_address_city, candidate.alternative_address_country]
        .filter(Boolean)
        .join(", "),
    ),
  ].join("");
  const publications = candidate.publications
    .map(
      (p) =>
        `<li><span class="pub-year">${p.year}</span> ${escapeHtml(p.title)}` +
        (p.source ? ` <span class="pub-source">${escapeHtml(p.source)}</span>` : "") +
        `</li>`,
    )
    .join("");
  return `
    <article class="candidate${active ? " active" : ""}${verdictClass}" data-cluster="${candidate.cluster_id}">
      <header>
        <h3>${escapeHtml(candidate.full_name)}</h3>
        <span class="years">${candidate.first_year}–${candidate.last_year} · ${candidate.n_pubs} pub${candidate.n_pubs === 1 ? "" : "s"}</span>
        ${badges}
      </header>
      <div class="fields">
        ${field("first name", candidate.first_name)}
        ${field("e-mail", candidate.email)}
        ${field("organization", candidate.address_organization)}
        ${field(
          "place",
          [candidate.address_city, candidate.address_country].filter(Boolean).join(", "),
        )}
        ${alternatives}
      </div>
      <ul class="publications">${publications}</ul>
    </article>`;
}

const view: ReviewView = {
  renderQueue(rows: ResearcherRow[], activePersonId: string | null): void {
    queueList.innerHTML = rows
      .map((row) => {
        const classes = ["queue-row"];
        if (row.person_id === activePersonId) {
          classes.push("active");
        }
        if (row.pending === 0) {
          classes.push("done");
        }
        const conflictMark = row.conflicts > 0 ? ` <span class="badge conflict">!</span>` : "";
        return `
          <li class="${classes.join(" ")}" data-person="${escapeHtml(row.person_id)}">
            <span class="queue-name">${escapeHtml(row.last_name)}, ${escapeHtml(row.first_name)}</span>
            <span class="queue-place">${escapeHtml(row.city)}</span>
            <span class="queue-pending">${row.pending}/${row.candidates}</span>${conflictMark}
          </li>`;
      })
      .join("");
  },

  renderCandidates(detail: CandidateList | null, cursor: number): void {
    if (!detail || detail.candidates.length === 0) {
      candidatePane.innerHTML = `<p class="empty">no candidate clusters</p>`;
      return;
    }
    candidatePane.innerHTML = detail.candidates
      .map((candidate, index) => candidateCard(candidate, index === cursor))
      .join("");
    const active = candidatePane.querySelector(".candidate.active");
    if (active) {
      active.scrollIntoView({ block: "nearest" });
    }
  },

  renderProgress(progress: Progress | null): void {
    if (!progress) {
      progressLabel.textContent = "progress unavailable";
      return;
    }
    const done = progress.total === 0 ? 0 : (100 * progress.decided) / progress.total;
    progressBar.style.width = `${done.toFixed(1)}%`;
    progressLabel.textContent =
      `${progress.decided}/${progress.total} decided · ` +
      `${progress.accepted} accepted · ${progress.rejected} rejected`;
  },

  renderOfflineCount(count: number): void {
    offlineBadge.textContent = count === 0 ? "" : `${count} queued`;
    retryButton.hidden = count === 0;
  },

  notify(kind: "info" | "error", message: string): void {
    toast.textContent = message;
    toast.className = `toast ${kind}`;
    if (toastTimer !== null) {
      clearTimeout(toastTimer);
    }
    toastTimer = setTimeout(() => {
      toast.className = "toast hidden";
    }, 4000);
  },
};

const storage = (() => {
  try {
    window.localStorage.setItem("byline.probe", "1");
    window.localStorage.removeItem("byline.probe");
    return window.localStorage;
  } catch {
    return new MemoryStorage();
  }
})();

const api = new ApiClient("", resolveToken());
const controller = new ReviewController(api, view, new OfflineQueue(storage));

function onKeyDown(event: KeyboardEvent): void {
  if (event.target instanceof HTMLInputElement || event.target instanceof HTMLTextAreaElement) {
    return;
  }
  switch (event.key) {
    case "a":
      void controller.accept();
      break;
    case "r":
      void controller.reject();
      break;
    case "n":
      controller.moveCandidate(1);
      break;
    case "p":
      controller.moveCandidate(-1);
      break;
    case "ArrowDown":
      event.preventDefault();
      void controller.moveResearcher(1);
      break;
    case "ArrowUp":
      event.preventDefault();
      void controller.moveResearcher(-1);
      break;
    default:
      return;
  }
}

function init(): void {
  document.addEventListener("keydown", onKeyDown);
  queueList.addEventListener("click", (event) => {
    const row = (event.target as HTMLElement).closest<HTMLElement>(".queue-row");
    if (row?.dataset.person) {
      void controller.selectResearcher(row.dataset.person);
    }
  });
  candidatePane.addEventListener("click", (event) => {
    const card = (event.target as HTMLElement).closest<HTMLElement>(".candidate");
    if (!card || !controller.currentDetail) {
      return;
    }
    const clusterId = Number(card.dataset.cluster);
    const index = controller.currentDetail.candidates.findIndex(
      (c) => c.cluster_id === clusterId,
    );
    if (index >= 0) {
      controller.moveCandidate(index - controller.currentCursor);
    }
  });
  retryButton.addEventListener("click", () => {
    void controller.retryQueued();
  });
  void controller.start().catch((err) => {
    view.notify("error", `failed to load review data: ${err instanceof Error ? err.message : err}`);
  });
}

init();
