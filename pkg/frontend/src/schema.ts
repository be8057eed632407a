/** Wire schemas mirroring the service API (docs/api.md). */

import { z } from "zod";

export const RuleKinds = [
  "constant",
  "power_law",
  "equality",
  "inequality_le",
  "inequality_ge",
] as const;

export const RuleSchema = z.object({
  id: z.string(),
  kind: z.enum(RuleKinds),
  i: z.number().int().nonnegative(),
  j: z.number().int().nonnegative().optional(),
  kappa: z.number().optional(),
  b: z.number().optional(),
  c: z.number().optional(),
  sigma_c: z.number().optional(),
  nu_stats: z
    .object({
      nu1_mean: z.number(),
      nu1_std: z.number(),
      nu2_mean: z.number(),
      nu2_std: z.number(),
    })
    .optional(),
  correlation: z.number().optional(),
  score: z.number().min(0).max(1),
  rank: z.number().int().positive(),
  excluded: z.boolean(),
});
export type Rule = z.infer<typeof RuleSchema>;

export const RunStateSchema = z.object({
  fe: z.number().int().nonnegative(),
  gen: z.number().int().nonnegative(),
  hv: z.number(),
  status: z.enum(["created", "running", "paused_for_feedback", "finished", "failed"]),
  ensemble_p: z.record(z.array(z.number())),
  archive_size: z.number().int().nonnegative(),
});
export type RunState = z.infer<typeof RunStateSchema>;

export const RunSummarySchema = z.object({
  id: z.string(),
  status: z.string(),
  fe: z.number(),
  gen: z.number(),
  problem: z.string(),
  agent: z.string(),
  user: z.string(),
  mode: z.string(),
});
export type RunSummary = z.infer<typeof RunSummarySchema>;

export const ArchiveSchema = z.object({
  fe: z.number(),
  hv: z.number(),
  F: z.array(z.array(z.number()).length(2)),
  X: z.array(z.array(z.number())),
});
export type Archive = z.infer<typeof ArchiveSchema>;

/** Exactly what POST /runs/{id}/feedback accepts. */
export const UserFeedbackSchema = z
  .object({
    rankings: z.record(z.number().int().positive()),
    exclusions: z.array(z.string()),
    specificity: z
      .object({
        min_score: z.number().min(0).max(1).optional(),
        min_correlation: z.number().min(0).max(1).optional(),
      })
      .optional(),
  })
  .refine(
    (fb) => Object.keys(fb.rankings).every((id) => !fb.exclusions.includes(id)),
    { message: "a rule cannot be both ranked and excluded" },
  );
export type UserFeedback = z.infer<typeof UserFeedbackSchema>;
