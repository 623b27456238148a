// DOM bindings: wires the controller to the static page.

import { ApiClient, Candidate, ProfileTerms, Report } from "./api.js";
import { AppController, View } from "./app.js";

function must<T extends Element>(doc: Document, id: string): T {
    const el = doc.getElementById(id);
    if (!el) throw new Error(`missing element #${id}`);
    return el as unknown as T;
}

class DomView implements View {
    private digestFrame: HTMLIFrameElement;
    private candidateList: HTMLOListElement;
    private reportLine: HTMLParagraphElement;
    private chips: HTMLDivElement;
    private notice: HTMLParagraphElement;
    private submitBtn: HTMLButtonElement;

    onRemoveTerm: (term: string) => void = () => {};

    constructor(private doc: Document) {
        this.digestFrame = must(doc, "digest-frame");
        this.candidateList = must(doc, "candidate-list");
        this.reportLine = must(doc, "report-line");
        this.chips = must(doc, "term-chips");
        this.notice = must(doc, "notice");
        this.submitBtn = must(doc, "submit-btn");
    }

    renderDigest(html: string): void {
        // The digest pane shows exactly the server-composed page, sandboxed.
        this.digestFrame.setAttribute("srcdoc", html);
    }

    renderCandidates(candidates: Candidate[]): void {
        this.candidateList.textContent = "";
        for (const candidate of candidates) {
            const item = this.doc.createElement("li");

            const title = this.doc.createElement("strong");
            title.textContent = candidate.heading ?? "(untitled segment)";
            item.appendChild(title);

            const score = this.doc.createElement("span");
            score.className = "score";
            score.textContent =
                ` ${candidate.score.toFixed(4)} ` +
                `(query ${candidate.query_density.toFixed(4)}, ` +
                `profile ${candidate.profile_density.toFixed(4)})`;
            item.appendChild(score);

            const link = this.doc.createElement("a");
            link.href = candidate.source_url;
            link.target = "_blank";
            link.rel = "noopener";
            link.textContent = candidate.source_url;
            item.appendChild(this.doc.createElement("br"));
            item.appendChild(link);

            const preview = this.doc.createElement("p");
            preview.className = "preview";
            preview.textContent = candidate.text_preview;
            item.appendChild(preview);

            this.candidateList.appendChild(item);
        }
    }

    renderReport(report: Report): void {
        this.reportLine.textContent =
            `${report.pages_fetched} pages fetched, ${report.pages_skipped} skipped, ` +
            `${report.segments_total} segments, ${report.candidates_selected} selected`;
    }

    renderProfile(terms: ProfileTerms): void {
        this.chips.textContent = "";
        for (const term of Object.keys(terms).sort()) {
            const chip = this.doc.createElement("button");
            chip.type = "button";
            chip.className = "chip";
            chip.textContent = `${term} ×`;
            chip.addEventListener("click", () => this.onRemoveTerm(term));
            this.chips.appendChild(chip);
        }
    }

    showNotice(message: string): void {
        this.notice.textContent = message;
        this.notice.hidden = false;
    }

    clearNotice(): void {
        this.notice.textContent = "";
        this.notice.hidden = true;
    }

    setBusy(busy: boolean): void {
        this.submitBtn.setAttribute("aria-busy", String(busy));
    }
}

export function initApp(doc: Document, api: ApiClient = new ApiClient()): AppController {
    const view = new DomView(doc);
    const controller = new AppController(api, view);
    view.onRemoveTerm = (term) => void controller.removeTerm(term);

    const searchForm = must<HTMLFormElement>(doc, "search-form");
    const queryInput = must<HTMLInputElement>(doc, "query-input");
    const submitBtn = must<HTMLButtonElement>(doc, "submit-btn");
    const deltaSlider = must<HTMLInputElement>(doc, "delta-slider");
    const deltaValue = must<HTMLOutputElement>(doc, "delta-value");
    const profileIdInput = must<HTMLInputElement>(doc, "profile-id-input");
    const termForm = must<HTMLFormElement>(doc, "term-form");
    const termInput = must<HTMLInputElement>(doc, "term-input");

    queryInput.addEventListener("input", () => {
        submitBtn.disabled = !controller.canSubmit(queryInput.value);
    });
    searchForm.addEventListener("submit", (event) => {
        event.preventDefault();
        void controller.submitQuery(queryInput.value);
    });
    deltaSlider.addEventListener("input", () => {
        deltaValue.textContent = Number(deltaSlider.value).toFixed(2);
    });
    deltaSlider.addEventListener("change", () => {
        void controller.adjustDelta(Number(deltaSlider.value));
    });
    profileIdInput.addEventListener("change", () => {
        void controller.setProfileId(profileIdInput.value);
    });
    termForm.addEventListener("submit", (event) => {
        event.preventDefault();
        void controller.addTerms(termInput.value);
        termInput.value = "";
    });

    void controller.reloadProfile();
    return controller;
}

declare const window: (Window & typeof globalThis) | undefined;
if (typeof window !== "undefined" && typeof document !== "undefined") {
    const boot = () => {
        if (document.getElementById("search-form")) initApp(document);
    };
    if (document.readyState === "loading") {
        document.addEventListener("DOMContentLoaded", boot);
    } else {
        boot();
    }
}
