use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use num_bigint::BigUint;
use num_rational::BigRational;

use rsponge::dyadic::codec;
use rsponge::entropy::{self, LogQuantity};
use rsponge::equidecomp::{
    build_xy, verify_cover, verify_equidecomposition, PieceDecomposition, ProbabilityMode, ProbabilityQuery,
    ProbabilityResult, subcongruence_probability,
};
use rsponge::motions::{parse_mat4, parse_q, DyadicMotion};
use rsponge::persist::{read_trace, sha256_hex, write_trace, ExperimentManifest};
use rsponge::search::{detect_subcongruent_exact, expansion_counterexample, find_safe_cube, Disjointness};
use rsponge::sponge::{generate, Mode, Schedule, DEFAULT_BUDGET};
use rsponge::{DyadicComplex, DyadicRational};

use crate::export::{stl, voxels};
use crate::{Command, DisjointArg, FormatArg, MethodArg, ModeArg, MotionArgs, Verdict};

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Positive
    } else {
        Verdict::Negative
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_schedule(path: &Path) -> Result<Schedule> {
    Ok(Schedule::from_toml(&read_text(path)?)?)
}

fn load_complex(path: &Path) -> Result<DyadicComplex> {
    codec::decode(&read_text(path)?).with_context(|| format!("decoding {}", path.display()))
}

fn disjointness(d: DisjointArg) -> Disjointness {
    match d {
        DisjointArg::Closed => Disjointness::Closed,
        DisjointArg::Interiors => Disjointness::InteriorsOnly,
    }
}

fn parse_motions(args: &MotionArgs) -> Result<Vec<DyadicMotion>> {
    args.motions
        .iter()
        .map(|s| {
            let parts: Vec<&str> = s.split_whitespace().collect();
            if parts.len() == 3 {
                let t = parts
                    .iter()
                    .map(|p| p.parse::<DyadicRational>().map_err(anyhow::Error::from))
                    .collect::<Result<Vec<_>>>()?;
                return Ok(DyadicMotion::translation([t[0].clone(), t[1].clone(), t[2].clone()]));
            }
            let m = parse_mat4(s)?;
            DyadicMotion::from_mat4(&m).with_context(|| format!("{s:?} is not a cube symmetry with dyadic translation"))
        })
        .collect()
}

/// Writes `text` to `out` and a manifest naming it to `out.manifest`.
fn write_output(out: &Path, text: &str, manifest: ExperimentManifest) -> Result<()> {
    fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
    let mut manifest = manifest;
    let name = out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    manifest.add_output(&name, text.as_bytes());
    let mpath = PathBuf::from(format!("{}.manifest", out.display()));
    fs::write(&mpath, manifest.to_string()).with_context(|| format!("writing {}", mpath.display()))?;
    Ok(())
}

fn log_record(step: usize, key: &str, q: &LogQuantity) {
    let err = q.log2_abs().map(|i| i.width().to_f64()).unwrap_or(0.0);
    println!("{step} {key} {q} {err:e}");
}

pub fn run(command: Command) -> Result<Verdict> {
    match command {
        Command::Validate { config, mode } => {
            let s = load_schedule(&config)?;
            let mode = match mode {
                ModeArg::Strict => Mode::Strict,
                ModeArg::Relaxed => Mode::Relaxed,
            };
            let r = s.validate(mode);
            println!("schedule {s}");
            println!("digest {}", s.digest());
            println!("a {}", r.a);
            println!("b {:?}", r.b);
            for (name, c) in [("c", &r.c), ("d", &r.d), ("e", &r.e)] {
                println!("{name} failures={:?} uncertain={:?}", c.failures, c.uncertain);
            }
            println!("valid {}", r.is_valid());
            Ok(verdict(r.is_valid()))
        }

        Command::Generate {
            config,
            seed,
            depth,
            out,
            budget,
        } => {
            let s = load_schedule(&config)?;
            let t = generate(&s, seed, depth, budget.unwrap_or(DEFAULT_BUDGET))?;
            let m = write_trace(&out, &t)?;
            for (i, c) in t.complexes.iter().enumerate() {
                println!("step {i} level {} cubes {} measure {}", c.level(), c.len(), c.measure());
            }
            println!("manifest {}", m.digest());
            Ok(Verdict::Positive)
        }

        Command::Inspect { input } => {
            if input.is_dir() {
                let t = read_trace(&input)?;
                println!("trace seed {} depth {} schedule {}", t.seed, t.depth(), t.schedule.digest());
                for (i, c) in t.complexes.iter().enumerate() {
                    println!("step {i} level {} cubes {} measure {}", c.level(), c.len(), c.measure());
                }
            } else {
                let c = load_complex(&input)?;
                println!("level {} cubes {} measure {}", c.level(), c.len(), c.measure());
                if let Some((lo, hi)) = c.bounding_coords() {
                    println!("bounds {lo:?} {hi:?}");
                }
                println!("inside_unit_cube {}", c.is_within_unit_cube());
            }
            Ok(Verdict::Positive)
        }

        Command::DetectSubcongruence {
            input,
            scube_level,
            resolution,
            disjointness: d,
            out,
        } => {
            let m = load_complex(&input)?;
            let r = resolution.unwrap_or(m.level());
            match detect_subcongruent_exact(&m, scube_level, r, disjointness(d))? {
                Some(w) => {
                    let text = w.to_record();
                    print!("{text}");
                    if let Some(out) = out {
                        let manifest = ExperimentManifest::new("detect-subcongruence")
                            .param("input_sha256", sha256_hex(codec::encode(&m).as_bytes()))
                            .param("scube_level", scube_level)
                            .param("resolution", r);
                        write_output(&out, &text, manifest)?;
                    }
                    Ok(Verdict::Positive)
                }
                None => {
                    println!("none");
                    Ok(Verdict::Negative)
                }
            }
        }

        Command::FindSafeCube {
            trace,
            region,
            motions,
            out,
        } => {
            let t = read_trace(&trace)?;
            let a = match region {
                Some(p) => load_complex(&p)?,
                None => DyadicComplex::full(0),
            };
            let motions = parse_motions(&motions)?;
            match find_safe_cube(&t.complexes, &a, &motions)? {
                Some(cert) => {
                    let ok = cert.verify(&t.complexes);
                    let text = cert.to_record();
                    print!("{text}");
                    println!("verified {ok}");
                    if let Some(out) = out {
                        let manifest = ExperimentManifest::new("find-safe-cube").param("trace_seed", t.seed);
                        write_output(&out, &text, manifest)?;
                    }
                    Ok(verdict(ok))
                }
                None => {
                    println!("none");
                    Ok(Verdict::Negative)
                }
            }
        }

        Command::ExpansionAudit {
            trace,
            motions,
            epsilon,
            out,
        } => {
            let t = read_trace(&trace)?;
            let motions = parse_motions(&motions)?;
            let eps = parse_q(&epsilon)?;
            let eps = BigRational::new((*eps.numer()).into(), (*eps.denom()).into());
            match expansion_counterexample(&t.complexes, &motions, &eps)? {
                Some(c) => {
                    let ok = c.verify(t.last());
                    let text = c.to_record();
                    print!("{text}");
                    println!("verified {ok}");
                    if let Some(out) = out {
                        let manifest = ExperimentManifest::new("expansion-audit")
                            .param("trace_seed", t.seed)
                            .param("epsilon", &epsilon);
                        write_output(&out, &text, manifest)?;
                    }
                    Ok(verdict(ok))
                }
                None => {
                    println!("none");
                    Ok(Verdict::Negative)
                }
            }
        }

        Command::BuildXy { trace, step, out } => {
            let t = read_trace(&trace)?;
            let xy = build_xy(&t.complexes, step)?;
            let cover = xy.mutual_cover()?;
            let disjoint = xy.parts_disjoint();
            let equal = xy.x.measure() == xy.y.measure();
            println!("a {}", xy.a);
            println!("b {}", xy.b);
            println!("mu_x {}", xy.x.measure());
            println!("mu_y {}", xy.y.measure());
            println!("equal_measure {equal}");
            println!("parts_disjoint {disjoint}");
            println!("mutual_cover {cover}");
            println!("degenerate {}", xy.degenerate);
            if let Some(out) = out {
                fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
                let mut manifest = ExperimentManifest::new("build-xy").param("step", step);
                manifest.seed = Some(t.seed);
                manifest.schedule_digest = Some(t.schedule.digest());
                for (name, c) in [("x.dycx", &xy.x), ("y.dycx", &xy.y)] {
                    let text = codec::encode(c);
                    fs::write(out.join(name), &text)?;
                    manifest.add_output(name, text.as_bytes());
                }
                fs::write(out.join("manifest.txt"), manifest.to_string())?;
            }
            Ok(verdict(cover && disjoint && equal))
        }

        Command::VerifyEquidecomp { input } => {
            let d = PieceDecomposition::from_record(&read_text(&input)?)?;
            let r = verify_equidecomposition(&d)?;
            println!("level {}", r.level);
            for (clause, ok) in &r.verdicts {
                println!("{clause} {ok}");
            }
            println!("mu_source {}", d.source.measure());
            println!("mu_target {}", d.target.measure());
            // dyadic pieces only: a failure here says nothing about measurable pieces
            println!("pieces dyadic");
            Ok(verdict(r.passes()))
        }

        Command::VerifyCover { a, b, motions } => {
            let a = load_complex(&a)?;
            let b = load_complex(&b)?;
            let ok = verify_cover(&a, &b, &parse_motions(&motions)?)?;
            println!("covered {ok}");
            Ok(verdict(ok))
        }

        Command::McProbability {
            config,
            depth,
            scube_level,
            resolution,
            disjointness: d,
            method,
            trials,
            seed,
            budget,
        } => {
            let s = load_schedule(&config)?;
            let q = ProbabilityQuery {
                depth,
                s_level: scube_level,
                resolution,
                disjointness: disjointness(d),
            };
            let mode = match method {
                MethodArg::MonteCarlo => ProbabilityMode::MonteCarlo { trials, seed },
                MethodArg::Exact => ProbabilityMode::Exact { budget },
            };
            match subcongruence_probability(&s, &q, mode)? {
                ProbabilityResult::MonteCarlo(e) => {
                    println!("method monte-carlo");
                    println!("hits {}", e.hits);
                    println!("trials {}", e.trials);
                    println!("estimate {}", e.estimate);
                    println!("ci99 {} {}", e.estimate - e.half_width, e.estimate + e.half_width);
                }
                ProbabilityResult::Exact(e) => {
                    println!("method exact");
                    println!("hits {}", e.hits);
                    println!("outcomes {}", e.total);
                    println!("classes {}", e.classes);
                    println!("probability {}/{}", e.probability.numer(), e.probability.denom());
                }
            }
            Ok(Verdict::Positive)
        }

        Command::BoundsReport { config, depth } => {
            let s = load_schedule(&config)?;
            let steps = depth.unwrap_or(s.len() - 1).min(s.len() - 1);
            let s_next: Vec<BigUint> = (1..s.len()).map(|i| s.big_s(i)).collect();
            let i0 = entropy::find_i0(&s.big_s(0), &s.big_p(0), &s_next);
            let mut total = LogQuantity::zero();
            println!("# step key value error");
            for i in 0..steps {
                let big_p = s.big_p(i);
                let m = s.cube_count(i).context("cube count does not fit")?;
                let (p1, s1) = (s.p(i + 1), s.s(i + 1));
                let step = entropy::logrange_step(&m, s1, p1)?;
                log_record(i, "logrange_step", &step);
                total = total.checked_add(&step).context("logrange sum is not certified")?;
                log_record(i, "logrange_total", &total);
                let s_next = s.big_s(i + 1);
                log_record(i, "prop32_lower", &entropy::prop32_lower_bound(&big_p, p1, &s_next)?);
                log_record(i, "prop38_upper", &entropy::prop38_upper_bound(&big_p, p1, &s_next)?);
                let dom = entropy::step_dominates_prop32(&big_p, &s.big_s(i), s1, p1)?;
                println!("{i} step_dominates_lower {dom} 0");
                println!("{i} i0_holds {} 0", i0.holds[i]);
                println!("{i} i0_margin {} 0", i0.margin[i]);
            }
            match i0.index {
                Some(k) => println!("- i0 {k} 0"),
                None => println!("- i0 none 0"),
            }
            Ok(Verdict::Positive)
        }

        Command::Export { input, format, out } => {
            let c = load_complex(&input)?;
            let text = match format {
                FormatArg::Voxel => voxels(&c),
                FormatArg::Stl => stl(&c),
            };
            let kind = match format {
                FormatArg::Voxel => "voxel",
                FormatArg::Stl => "stl",
            };
            let manifest = ExperimentManifest::new("export")
                .param("format", kind)
                .param("input_sha256", sha256_hex(codec::encode(&c).as_bytes()));
            write_output(&out, &text, manifest)?;
            println!("cubes {} bytes {}", c.len(), text.len());
            Ok(Verdict::Positive)
        }
    }
}
