// UI controller: owns the state, talks to the API, pushes renders to a View.
// Deliberately DOM-free so tests can drive it against a live server.

import { ApiClient, ApiError, Candidate, ComposeResponse, ProfileTerms, Report } from "./api.js";

export interface UiState {
    query: string;
    profileId: string;
    profileTerms: ProfileTerms;
    delta: number;
    lastResponse: ComposeResponse | null;
}

export interface View {
    renderDigest(html: string): void;
    renderCandidates(candidates: Candidate[]): void;
    renderReport(report: Report): void;
    renderProfile(terms: ProfileTerms): void;
    showNotice(message: string): void;
    clearNotice(): void;
    setBusy(busy: boolean): void;
}

function clamp01(value: number): number {
    if (Number.isNaN(value)) return 0;
    return Math.min(1, Math.max(0, value));
}

export class AppController {
    readonly state: UiState = {
        query: "",
        profileId: "default",
        profileTerms: {},
        delta: 0.05,
        lastResponse: null,
    };

    // Monotonic ticket: only the newest in-flight compose may render.
    private ticket = 0;

    constructor(
        private readonly api: ApiClient,
        private readonly view: View,
    ) {}

    canSubmit(query: string): boolean {
        return query.trim().length > 0;
    }

    async submitQuery(query: string): Promise<void> {
        const trimmed = query.trim();
        if (!trimmed) return;
        this.state.query = trimmed;
        const mine = ++this.ticket;
        this.view.setBusy(true);
        try {
            const response = await this.api.compose({
                query: trimmed,
                profile_id: this.state.profileId,
                delta: this.state.delta,
            });
            if (mine !== this.ticket) return; // superseded; drop stale response
            this.state.lastResponse = response;
            this.view.clearNotice();
            this.view.renderDigest(response.html);
            this.view.renderCandidates(response.candidates);
            this.view.renderReport(response.report);
            if (response.candidates.length === 0) {
                this.view.showNotice(
                    "No segments cleared the threshold. Lower the delta slider to admit more.",
                );
            }
        } catch (error) {
            if (mine !== this.ticket) return;
            // Prior digest stays on screen; only the notice changes.
            const message =
                error instanceof ApiError && error.status === 404
                    ? `No results available for "${trimmed}".`
                    : error instanceof Error
                      ? error.message
                      : String(error);
            this.view.showNotice(message);
        } finally {
            if (mine === this.ticket) this.view.setBusy(false);
        }
    }

    async adjustDelta(value: number): Promise<void> {
        this.state.delta = clamp01(value);
        if (this.state.query) {
            await this.submitQuery(this.state.query);
        }
    }

    async setProfileId(profileId: string): Promise<void> {
        const id = profileId.trim();
        if (!id) return;
        this.state.profileId = id;
        await this.reloadProfile();
    }

    async reloadProfile(): Promise<void> {
        try {
            const terms = await this.api.getProfile(this.state.profileId);
            this.state.profileTerms = terms;
            this.view.renderProfile(terms);
        } catch (error) {
            this.view.showNotice(error instanceof Error ? error.message : String(error));
        }
    }

    /** Add raw term text; the server tokenizes, so one input may become
     * several chips. Does not resubmit the query. */
    async addTerms(raw: string): Promise<void> {
        const text = raw.trim();
        if (!text) return;
        const next: ProfileTerms = { ...this.state.profileTerms, [text]: 1.0 };
        await this.saveProfile(next);
    }

    async removeTerm(term: string): Promise<void> {
        const next: ProfileTerms = { ...this.state.profileTerms };
        delete next[term];
        await this.saveProfile(next);
    }

    private async saveProfile(terms: ProfileTerms): Promise<void> {
        try {
            const stored = await this.api.putProfile(this.state.profileId, terms);
            this.state.profileTerms = stored;
            this.view.clearNotice();
            this.view.renderProfile(stored);
        } catch (error) {
            this.view.showNotice(error instanceof Error ? error.message : String(error));
        }
    }
}
