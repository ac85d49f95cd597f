#!/usr/bin/env node
/**
 * plot_decay INPUT.csv -o OUT.svg [--log-y]
 *
 * Renders a nilorth ladder CSV (header statistic,M,H,value) to an SVG
 * decay figure. Exits 1 on schema violations without writing anything.
 */

import { readFileSync, writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { parseLadderCsv, SchemaError } from "./ladder";
import { renderLadderSvg } from "./render";

export function runCli(argv: string[]): number {
  const args = yargs(argv)
    .usage("plot_decay INPUT.csv -o OUT.svg [--log-y]")
    .option("o", {
      alias: "out",
      type: "string",
      demandOption: true,
      describe: "output SVG path",
    })
    .option("log-y", {
      type: "boolean",
      default: false,
      describe: "logarithmic value axis",
    })
    .option("width", { type: "number", default: 800 })
    .option("height", { type: "number", default: 520 })
    .demandCommand(1, "need exactly one input CSV")
    .strict()
    .exitProcess(false)
    .parseSync();

  const input = String(args._[0]);
  let text: string;
  try {
    text = readFileSync(input, "utf8");
  } catch (err) {
    console.error(`cannot read ${input}: ${(err as Error).message}`);
    return 1;
  }
  try {
    const table = parseLadderCsv(text);
    const svg = renderLadderSvg(table, {
      logY: args.logY as boolean,
      width: args.width,
      height: args.height,
      title: input.replace(/^.*\//, ""),
    });
    writeFileSync(args.o, svg);
    console.error(`wrote ${args.o} (${table.rows.length} rows)`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(runCli(hideBin(process.argv)));
}
