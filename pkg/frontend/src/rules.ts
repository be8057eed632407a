/** Rule view models: human-readable text for the rule browser. */

import type { Rule } from "./schema.js";

export interface RuleCard {
  id: string;
  kind: Rule["kind"];
  variables: string;
  relation: string;
  gloss: string;
  score: number;
  rank: number;
  correlation: number | null;
}

const fmt = (v: number, digits = 3): string => {
  const s = v.toFixed(digits);
  return s === "-0.000" ? "0.000" : s;
};

function varName(index: number): string {
  return `x${index + 1}`;
}

/** Relation text in normalized-space parameters plus a plain-language gloss. */
export function toRuleCard(rule: Rule): RuleCard {
  const xi = varName(rule.i);
  const xj = rule.j !== undefined ? varName(rule.j) : "";
  let relation: string;
  let gloss: string;
  switch (rule.kind) {
    case "constant":
      relation = `${xi} = ${fmt(rule.kappa ?? NaN)}`;
      gloss = `${xi} settles at ${fmt(rule.kappa ?? NaN)}`;
      break;
    case "power_law": {
      const b = rule.b ?? NaN;
      relation = `${xi}̂ · ${xj}̂^${fmt(b, 2)} = ${fmt(rule.c ?? NaN)}`;
      gloss =
        b > 0
          ? `${xi} shrinks when ${xj} grows`
          : `${xi} grows when ${xj} grows`;
      break;
    }
    case "equality":
      relation = `${xi} = ${xj}`;
      gloss = `${xi} and ${xj} stay equal`;
      break;
    case "inequality_le":
      relation = `${xi} ≤ ${xj}`;
      gloss = `${xi} stays below ${xj}`;
      break;
    case "inequality_ge":
      relation = `${xi} ≥ ${xj}`;
      gloss = `${xi} stays above ${xj}`;
      break;
  }
  return {
    id: rule.id,
    kind: rule.kind,
    variables: rule.j !== undefined ? `${xi}, ${xj}` : xi,
    relation,
    gloss,
    score: rule.score,
    rank: rule.rank,
    correlation: rule.correlation ?? null,
  };
}

export type SortKey = "score" | "kind" | "rank";

export function sortCards(cards: RuleCard[], key: SortKey): RuleCard[] {
  const out = [...cards];
  if (key === "score") out.sort((a, b) => b.score - a.score);
  else if (key === "rank") out.sort((a, b) => a.rank - b.rank);
  else out.sort((a, b) => a.kind.localeCompare(b.kind) || b.score - a.score);
  return out;
}

/** Edges for the VRG overlay: every non-constant rule links its pair. */
export function vrgEdges(rules: Rule[]): Array<{ from: number; to: number; kind: string; rank: number }> {
  return rules
    .filter((r) => r.j !== undefined)
    .map((r) => ({ from: r.i, to: r.j as number, kind: r.kind, rank: r.rank }));
}
