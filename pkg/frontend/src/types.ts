// Payload shapes of the review JSON API. Field names follow the server
// exactly; everything here is read-only data from the client's side.

export type Verdict = "accept" | "reject";

export type ResearcherRow = {
  person_id: string;
  last_name: string;
  first_name: string;
  city: string;
  country: string;
  field_code: string;
  candidates: number;
  pending: number;
  decided: number;
  conflicts: number;
};

export type PublicationSample = {
  pub_id: string;
  title: string;
  year: number;
  source: string;
};

export type Candidate = {
  cluster_id: number;
  n_pubs: number;
  first_year: number;
  last_year: number;
  full_name: string;
  first_name: string;
  email: string;
  address_organization: string;
  address_city: string;
  address_country: string;
  alternative_full_name: string;
  alternative_first_name: string;
  alternative_email: string;
  alternative_address_organization: string;
  alternative_address_city: string;
  alternative_address_country: string;
  pac_ids: [string, number][];
  publications: PublicationSample[];
  verdict: Verdict | null;
  conflict: boolean;
};

export type CandidateList = {
  person_id: string;
  candidates: Candidate[];
};

export type PersonProgress = {
  candidates: number;
  decided: number;
  pending: number;
};

export type Progress = {
  total: number;
  decided: number;
  pending: number;
  accepted: number;
  rejected: number;
  per_person: Record<string, PersonProgress>;
};

export type DecisionInput = {
  person_id: string;
  cluster_id: number;
  verdict: Verdict;
  reviewer?: string;
  ts?: string;
};

export type DecisionResult = {
  decision: Record<string, unknown>;
  pending: number;
};
