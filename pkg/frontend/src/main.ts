import { readFileSync } from "node:fs";

import { CsvError } from "./csv.js";
import { FigureSpec, render } from "./figure.js";

function usage(): void {
  console.error("usage: render --spec FILE.json [--out FILE.png]");
}

export function main(argv: string[]): number {
  let specPath: string | undefined;
  let outOverride: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--spec") specPath = argv[++i];
    else if (argv[i] === "--out") outOverride = argv[++i];
    else if (argv[i] === "render") continue;
    else {
      usage();
      return 2;
    }
  }
  if (!specPath) {
    usage();
    return 2;
  }
  let spec: FigureSpec;
  try {
    spec = JSON.parse(readFileSync(specPath, "utf8")) as FigureSpec;
  } catch (err) {
    console.error(`cannot load figure spec ${specPath}: ${err}`);
    return 2;
  }
  if (outOverride) spec.out = outOverride;
  try {
    const digests = render(spec);
    for (const d of digests) {
      console.log(`${d.csv}: x=${d.x_digest.slice(0, 12)} y=${d.y_digest.slice(0, 12)}`);
    }
    console.log(`wrote ${spec.out}`);
    return 0;
  } catch (err) {
    if (err instanceof CsvError) {
      console.error(String(err.message));
      return 1;
    }
    console.error(`render failed: ${err}`);
    return 1;
  }
}

const invokedDirectly = process.argv[1]?.endsWith("main.js");
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
