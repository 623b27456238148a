// Thin client for the digest service JSON API.

export interface ComposeRequest {
    query: string;
    profile_id: string;
    delta?: number;
    top_n?: number;
    alpha?: number;
    beta?: number;
}

export interface Candidate {
    source_url: string;
    heading: string | null;
    score: number;
    query_density: number;
    profile_density: number;
    text_preview: string;
}

export interface Report {
    pages_fetched: number;
    pages_skipped: number;
    segments_total: number;
    candidates_selected: number;
    stage_ms: Record<string, number>;
}

export interface ComposeResponse {
    html: string;
    candidates: Candidate[];
    report: Report;
}

export type ProfileTerms = Record<string, number>;

export class ApiError extends Error {
    constructor(readonly status: number, detail: string) {
        super(detail);
    }
}

type FetchLike = typeof fetch;

async function parseDetail(response: Response): Promise<string> {
    try {
        const body = (await response.json()) as { detail?: string };
        if (body && typeof body.detail === "string") return body.detail;
    } catch {
        // fall through to the generic message
    }
    return `request failed with status ${response.status}`;
}

export class ApiClient {
    constructor(
        private readonly baseUrl = "",
        private readonly fetchFn: FetchLike = fetch.bind(globalThis),
    ) {}

    private async request<T>(path: string, init?: RequestInit): Promise<T> {
        const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
        if (!response.ok) {
            throw new ApiError(response.status, await parseDetail(response));
        }
        return (await response.json()) as T;
    }

    compose(req: ComposeRequest): Promise<ComposeResponse> {
        return this.request<ComposeResponse>("/api/compose", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(req),
        });
    }

    getProfile(profileId: string): Promise<ProfileTerms> {
        return this.request<{ terms: ProfileTerms }>(
            `/api/profile/${encodeURIComponent(profileId)}`,
        ).then((body) => body.terms);
    }

    putProfile(profileId: string, terms: ProfileTerms): Promise<ProfileTerms> {
        return this.request<{ terms: ProfileTerms }>(
            `/api/profile/${encodeURIComponent(profileId)}`,
            {
                method: "PUT",
                headers: { "Content-Type": "application/json" },
                body: JSON.stringify({ terms }),
            },
        ).then((body) => body.terms);
    }

    health(): Promise<{ status: string }> {
        return this.request<{ status: string }>("/api/health");
    }
}
