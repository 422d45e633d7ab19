use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use flipcalc::biflipper::Side;
use flipcalc::headtotail::Mode;
use flipcalc::{sample, SpaceTag};
use flipcalc_cli::ops::{self, ApiError, Op, Request};
use flipcalc_cli::scene::{BiflipperEntry, FlipperEntry, Scene, SceneDoc, WordEntry};
use flipcalc_cli::{jsonfmt, render, service};

#[derive(Parser)]
#[command(name = "flipcalc", version, about = "Isometries as ordered pairs of flips")]
struct Cli {
    /// Geometric tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Also print errors as JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for `sample`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SceneArg {
    /// Scene file, or `-` for stdin.
    scene: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Matrix of a biflipper.
    Encode {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        biflipper: String,
    },
    /// Kind and parameters of a biflipper or a reflection word.
    Classify {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long, conflicts_with = "word", required_unless_present = "word")]
        biflipper: Option<String>,
        #[arg(long)]
        word: Option<String>,
    },
    /// Head-to-tail composition: `second` after `first`.
    Compose {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
        /// Fail with NotLinked instead of decomposing the product.
        #[arg(long, conflicts_with = "fallback")]
        strict: bool,
        #[arg(long)]
        fallback: bool,
        /// Also draw the construction (`-` for stdout, replacing the JSON).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Whether two biflippers encode the same isometry.
    Equiv {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Equivalent biflipper with a prescribed tail or head.
    Rebase {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        biflipper: String,
        #[arg(long)]
        flipper: String,
        #[arg(long, value_parser = parse_side)]
        side: Side,
    },
    /// A flipper shared by two isometries, or null.
    Linked {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
    },
    /// Shortest form of a reflection word, with the moves used.
    Reduce {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        word: String,
    },
    /// Unit quaternion of an S2 biflipper.
    Quat {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        biflipper: String,
    },
    /// Draw a scene.
    Render {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long, default_value = "-")]
        svg: PathBuf,
    },
    /// Random scene for a space, driven by --seed.
    Sample {
        #[arg(long)]
        space: SpaceTag,
        #[arg(long, default_value_t = 2)]
        count: usize,
    },
    /// HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Value of Access-Control-Allow-Origin.
        #[arg(long, default_value = "*")]
        origin: String,
        #[arg(long, default_value_t = 4)]
        workers: usize,
    },
}

fn parse_side(s: &str) -> Result<Side, String> {
    s.parse().map_err(|e: flipcalc::Error| e.to_string())
}

fn read_scene(path: &Path) -> Result<SceneDoc, ApiError> {
    let text = if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(path)
    }
    .map_err(|e| ApiError::malformed("Io", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ApiError::malformed("MalformedScene", format!("scene JSON: {e}")))
}

fn write_out(path: &Path, text: &str) -> Result<(), ApiError> {
    let res = if path == Path::new("-") {
        std::io::stdout().write_all(text.as_bytes())
    } else {
        std::fs::write(path, text)
    };
    res.map_err(|e| ApiError::malformed("Io", format!("{}: {e}", path.display())))
}

fn request(scene: &SceneArg, tol: f64) -> Result<Request, ApiError> {
    Ok(Request { scene: Some(read_scene(&scene.scene)?), tol: Some(tol), ..Request::default() })
}

fn sample_scene(space: SpaceTag, count: usize, seed: u64) -> SceneDoc {
    let mut rng = sample::rng(seed);
    let mut doc = SceneDoc { space, flippers: vec![], biflippers: vec![], words: vec![] };
    let entry = |doc: &mut SceneDoc, f: &flipcalc::flips::Flipper| {
        let id = format!("f{}", doc.flippers.len() + 1);
        let c = f.to_coords();
        doc.flippers.push(FlipperEntry { id: id.clone(), kind: c.kind, coords: c.coords, chart: c.chart });
        id
    };
    for i in 0..count {
        let b = sample::biflipper(&mut rng, space);
        let tail = entry(&mut doc, b.tail());
        let head = entry(&mut doc, b.head());
        doc.biflippers.push(BiflipperEntry { id: format!("b{}", i + 1), tail, head });
    }
    if space == SpaceTag::E2 {
        let w = sample::word(&mut rng, 6);
        let letters = w.letters().iter().map(|f| entry(&mut doc, f)).collect();
        doc.words.push(WordEntry { id: "w1".into(), letters });
    }
    doc
}

fn execute(cli: &Cli) -> Result<String, ApiError> {
    let tol = cli.tol;
    let (op, req) = match &cli.command {
        Command::Encode { scene, biflipper } => {
            (Op::Encode, Request { biflipper: Some(biflipper.clone()), ..request(scene, tol)? })
        }
        Command::Classify { scene, biflipper, word } => {
            (Op::Classify, Request { biflipper: biflipper.clone(), word: word.clone(), ..request(scene, tol)? })
        }
        Command::Compose { scene, first, second, strict, svg, .. } => {
            let mode = if *strict { Mode::Strict } else { Mode::Fallback };
            let req = Request {
                first: Some(first.clone()),
                second: Some(second.clone()),
                mode: Some(mode),
                ..request(scene, tol)?
            };
            if let Some(path) = svg {
                let c = ops::compose(&req)?;
                let figure = render::composition_svg(c.scene.space, &c.first, &c.second, &c.result);
                write_out(path, &figure)?;
                if path == Path::new("-") {
                    return Ok(String::new());
                }
            }
            (Op::Compose, req)
        }
        Command::Equiv { scene, a, b } => {
            (Op::Equivalent, Request { a: Some(a.clone()), b: Some(b.clone()), ..request(scene, tol)? })
        }
        Command::Rebase { scene, biflipper, flipper, side } => (
            Op::Rebase,
            Request {
                biflipper: Some(biflipper.clone()),
                flipper: Some(flipper.clone()),
                side: Some(*side),
                ..request(scene, tol)?
            },
        ),
        Command::Linked { scene, first, second } => {
            (Op::Linked, Request { first: Some(first.clone()), second: Some(second.clone()), ..request(scene, tol)? })
        }
        Command::Reduce { scene, word } => (Op::Reduce, Request { word: Some(word.clone()), ..request(scene, tol)? }),
        Command::Quat { scene, biflipper } => {
            (Op::QuaternionLift, Request { biflipper: Some(biflipper.clone()), ..request(scene, tol)? })
        }
        Command::Render { scene, svg } => {
            let scene = Scene::from_doc(&read_scene(&scene.scene)?)?;
            write_out(svg, &render::scene_svg(&scene))?;
            return Ok(String::new());
        }
        Command::Sample { space, count } => {
            return Ok(format!("{}\n", jsonfmt::to_string(&sample_scene(*space, *count, cli.seed))));
        }
        Command::Serve { port, host, origin, workers } => {
            let addr = format!("{host}:{port}");
            let server = service::bind(&addr).map_err(|e| ApiError::malformed("Io", e))?;
            eprintln!("listening on http://{addr}/api/v1/");
            service::serve(server, origin, *workers);
            return Ok(String::new());
        }
    };
    ops::run(op, &req).map(|json| format!("{json}\n"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            if cli.json {
                println!("{}", e.to_json());
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
