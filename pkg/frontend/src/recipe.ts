/**
 * Figure recipes: a small JSON description binding CSV columns to one of the
 * four figure kinds the scan data supports.
 */

import { readFileSync } from "fs";

import { ScanTable } from "./csv";

export const FIGURE_KINDS = ["timeseries", "heatmap", "difference", "scaling"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureRecipe {
  kind: FigureKind;
  input: string;
  output: string;
  x: string;
  y?: string;
  value?: string; // heatmap cell value
  series_by?: string;
  panel_by?: string;
  slope?: string; // scaling fit columns
  intercept?: string;
  x_label?: string;
  y_label?: string;
  title?: string;
}

export class RecipeError extends Error {}

export class MissingColumnError extends RecipeError {
  readonly column: string;

  constructor(column: string, input: string) {
    super(`column ${JSON.stringify(column)} not found in ${input}`);
    this.column = column;
  }
}

const STRING_FIELDS: (keyof FigureRecipe)[] = [
  "input",
  "output",
  "x",
  "y",
  "value",
  "series_by",
  "panel_by",
  "slope",
  "intercept",
  "x_label",
  "y_label",
  "title",
];

export function parseRecipe(text: string, source: string): FigureRecipe {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    throw new RecipeError(`recipe ${source} is not valid JSON`);
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new RecipeError(`recipe ${source} must be a JSON object`);
  }
  const rec = doc as Record<string, unknown>;
  if (!FIGURE_KINDS.includes(rec.kind as FigureKind)) {
    throw new RecipeError(`recipe kind must be one of ${FIGURE_KINDS.join(", ")}, got ${rec.kind}`);
  }
  for (const field of STRING_FIELDS) {
    if (field in rec && typeof rec[field] !== "string") {
      throw new RecipeError(`recipe field ${field} must be a string`);
    }
  }
  for (const field of ["input", "output", "x"] as const) {
    if (!rec[field]) throw new RecipeError(`recipe is missing required field ${field}`);
  }
  const recipe = rec as unknown as FigureRecipe;
  if (recipe.kind === "heatmap") {
    if (!recipe.y || !recipe.value) {
      throw new RecipeError("heatmap recipes need both y and value columns");
    }
  } else if (!recipe.y) {
    throw new RecipeError(`${recipe.kind} recipes need a y column`);
  }
  return recipe;
}

export function loadRecipe(path: string): FigureRecipe {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new RecipeError(`cannot read recipe file: ${path}`);
  }
  return parseRecipe(text, path);
}

/** Every column the recipe references must exist in the CSV header. */
export function checkColumns(recipe: FigureRecipe, table: ScanTable): void {
  const bound = [
    recipe.x,
    recipe.y,
    recipe.value,
    recipe.series_by,
    recipe.panel_by,
    recipe.slope,
    recipe.intercept,
  ];
  for (const name of bound) {
    if (name && !table.columns.includes(name)) {
      throw new MissingColumnError(name, recipe.input);
    }
  }
}
