use std::fs;
use std::io::Write as IoWrite;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hemisys::codes;
use hemisys::graphs;
use hemisys::hemi::{self, Construction};
use hemisys::lemmas;
use hemisys::Error;

#[derive(Parser)]
#[command(
    name = "hemisys",
    version,
    about = "Hemisystems of the Hermitian surface H(3,p²) for primes p = 1+4a²: construction, certification, and derived graphs/codes"
)]
struct Cli {
    /// Worker threads for parallel loops (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Cache directory for precomputed geometry (env: HEMISYS_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Scan primes p ≡ 5 (mod 8) up to a bound and report the Landau
    /// condition p = 1+4a² alongside its elliptic-curve equivalents.
    Landau {
        #[arg(long)]
        max: u64,
        /// Output format: csv or json.
        #[arg(long, default_value = "csv")]
        format: String,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the supporting lemma suite at a prime p ≡ 5 (mod 8) and report
    /// per-lemma pass/fail with counts.
    Lemmas {
        #[arg(long)]
        p: u64,
        /// Skip the r/r′ count (avoids building the full surface geometry).
        #[arg(long)]
        skip_geometry: bool,
    },
    /// Construct the hemisystem at p, verify it, and write the certificate.
    Construct {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "artifacts")]
        out: PathBuf,
        /// Verify all four orbit pairings, not only the rule's choice.
        #[arg(long)]
        explore: bool,
        /// Build even if p fails the Landau gate (experimental).
        #[arg(long)]
        force: bool,
    },
    /// Re-verify a certificate file from scratch.
    Verify {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Build and verify the strongly regular graphs.
    Srg {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "artifacts")]
        out: PathBuf,
        /// Which graph: thas, cayley, or both.
        #[arg(long, default_value = "both")]
        kind: String,
    },
    /// Build the two-intersection set and the two-weight code.
    Code {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "artifacts")]
        out: PathBuf,
        /// Allow the q⁶-codeword enumeration at large p.
        #[arg(long)]
        allow_large: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let cache = cli
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("HEMISYS_CACHE_DIR").map(PathBuf::from));
    match run(cli, cache.as_deref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Precondition(_) | Error::Domain(_) | Error::Config(_)
                | Error::ResourceLimit(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli, cache: Option<&std::path::Path>) -> Result<(), Error> {
    match cli.cmd {
        Cmd::Landau { max, format, out } => cmd_landau(max, &format, out),
        Cmd::Lemmas { p, skip_geometry } => cmd_lemmas(p, skip_geometry, cache),
        Cmd::Construct { p, out, explore, force } => cmd_construct(p, &out, explore, force, cache),
        Cmd::Verify { cert } => cmd_verify(&cert, cache),
        Cmd::Srg { p, out, kind } => cmd_srg(p, &out, &kind, cache),
        Cmd::Code { p, out, allow_large } => cmd_code(p, &out, allow_large, cache),
    }
}

fn cmd_landau(max: u64, format: &str, out: Option<PathBuf>) -> Result<(), Error> {
    let records = lemmas::landau_scan(max)?;
    let mut buf: Vec<u8> = Vec::new();
    match format {
        "csv" => lemmas::write_landau_csv(&records, &mut buf)?,
        "json" => serde_json::to_writer_pretty(&mut buf, &records)?,
        other => return Err(Error::Config(format!("unknown format {other:?}"))),
    }
    match out {
        Some(path) => fs::write(path, buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

fn gate_mod8(p: u64) -> Result<(), Error> {
    if !lemmas::is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    if p % 8 != 5 {
        return Err(Error::Precondition(format!(
            "p = {p} ≡ {} (mod 8); the lemma suite applies to p ≡ 5 (mod 8)",
            p % 8
        )));
    }
    Ok(())
}

fn cmd_lemmas(p: u64, skip_geometry: bool, cache: Option<&std::path::Path>) -> Result<(), Error> {
    gate_mod8(p)?;
    let t = hemisys::ff::Tower::new(p)?;
    let mut all_ok = true;
    let mut report = |name: &str, outcome: Result<String, Error>| {
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(e) => {
                all_ok = false;
                println!("FAIL {name}: {e}");
            }
        }
    };

    for eps in [1i64, -1] {
        report(
            &format!("eq(2) solutions (ε={eps:+})"),
            lemmas::solve_eq_v(&t, eps).and_then(|v| {
                if v.len() as u64 == (p + 1) / 2 {
                    Ok(format!("{} = (q+1)/2", v.len()))
                } else {
                    Err(Error::TheoremViolation(format!("{} ≠ (q+1)/2", v.len())))
                }
            }),
        );
        report(
            &format!("conic count (ε={eps:+})"),
            lemmas::conic_solution_count(&t, eps).and_then(|c| {
                if c.projective == p + 1 {
                    Ok(format!("{} = q+1", c.projective))
                } else {
                    Err(Error::TheoremViolation(format!("{} ≠ q+1", c.projective)))
                }
            }),
        );
        report(
            &format!("non-square condition (ε={eps:+})"),
            lemmas::solve_eq_v(&t, eps).and_then(|vs| {
                for v in &vs {
                    if !lemmas::nonsquare_condition(&t, eps, *v)? {
                        return Err(Error::TheoremViolation("a solution violates it".into()));
                    }
                }
                Ok(format!("universal over {} solutions", vs.len()))
            }),
        );
        report(
            &format!("fixture identities (ε={eps:+})"),
            lemmas::TangentCaseContext::build(&t, eps).map(|_| "all hold".into()),
        );
    }
    report(
        "ξ-parametrization",
        lemmas::TangentCaseContext::build(&t, 1)
            .and_then(|ctx| lemmas::verify_xi_parametrization(&t, &ctx))
            .map(|_| "image = solution set".into()),
    );
    report(
        "Σ-partition",
        lemmas::sigma_partition(&t).map(|(s1, s2)| format!("|Σ1| = {}, |Σ2| = {}", s1.len(), s2.len())),
    );
    let record = lemmas::landau_record(p)?;
    report(
        "quartic count",
        Ok(format!(
            "n_q = {}, N_p = {}, condition B = {}",
            record.n_q, record.n_p, record.condition_b
        )),
    );
    if !skip_geometry {
        let con = Construction::build_unchecked(p, cache)?;
        let ctx = lemmas::TangentCaseContext::build(&t, 1)?;
        report(
            "pencil structure",
            lemmas::verify_pencil_structure(&t, &con.surface, &con.plus, &con.minus, &con.cls, &ctx)
                .map(|_| "unique Ω-line and collinearity filter hold".into()),
        );
        report(
            "r/r′ counts",
            lemmas::count_r_rprime(&t, &con.surface, &con.plus, &ctx, &con.orbits).and_then(
                |(r, rp)| {
                    let lo = (p - 1) / 4;
                    let hi = (p + 3) / 4;
                    if r.min(rp) == lo && r.max(rp) == hi && record.n_q == 2 * rp - 1 {
                        Ok(format!("r = {r}, r′ = {rp}, r+r′ = {}, n_q = 2r′−1", r + rp))
                    } else {
                        Err(Error::TheoremViolation(format!("r = {r}, r′ = {rp}")))
                    }
                },
            ),
        );
    }
    if all_ok {
        Ok(())
    } else {
        Err(Error::TheoremViolation("one or more lemmas failed".into()))
    }
}

fn cmd_construct(
    p: u64,
    out: &std::path::Path,
    explore: bool,
    force: bool,
    cache: Option<&std::path::Path>,
) -> Result<(), Error> {
    let con = if force {
        gate_mod8(p)?;
        Construction::build_unchecked(p, cache)?
    } else {
        match Construction::build(p, cache) {
            Ok(c) => c,
            Err(e) => {
                if let Ok(rec) = lemmas::landau_record(p) {
                    eprintln!("landau record: {}", serde_json::to_string(&rec)?);
                }
                return Err(e);
            }
        }
    };
    let assembly = hemi::assemble(&con, explore)?;
    let mut checker = hemi::IncidenceChecker::new(&con.tower)?;
    let m_lines: Vec<u32> = assembly.m1.iter().chain(assembly.m2.iter()).copied().collect();
    checker.verify_half_conditions(&con.tower, &con.surface, &con.cls, &m_lines)?;
    let inv = hemi::verify_invariance(&con, &assembly, None)?;
    let cert = hemi::make_certificate(&con, &assembly);
    fs::create_dir_all(out)?;
    let cert_path = out.join(format!("hemisystem-p{p}.json"));
    fs::write(&cert_path, serde_json::to_vec_pretty(&cert)?)?;
    let csv_path = out.join(format!("hemisystem-p{p}-lines.csv"));
    let mut f = fs::File::create(&csv_path)?;
    hemi::write_lines_csv(&con, &assembly.s, &mut f)?;
    println!(
        "p = {p}: |S| = {} = {} + {} + {}, every point on (q+1)/2 = {} lines",
        cert.size,
        cert.m1_size,
        cert.m2_size,
        cert.chord_size,
        (p + 1) / 2
    );
    println!(
        "r = {}, r′ = {}, ℓ-choice = {}, rule predicted pairing: {}",
        assembly.r, assembly.rprime, cert.ell_choice, assembly.rule_matched
    );
    if explore {
        for o in &assembly.pairings {
            println!(
                "pairing (M1 with g0: {}, M2 with ℓ+: {}): verified = {}",
                o.m1_with_g0, o.m2_with_ell_plus, o.verified
            );
        }
    }
    println!("invariant under 𝔥 generators; coset moves M1: {}", inv.coset_moves_m1);
    println!("certificate: {} (digest {})", cert_path.display(), cert.digest);
    println!("lines: {}", csv_path.display());
    if !cert.verified {
        return Err(Error::TheoremViolation("certificate not verified".into()));
    }
    Ok(())
}

fn cmd_verify(cert_path: &std::path::Path, cache: Option<&std::path::Path>) -> Result<(), Error> {
    let data = fs::read(cert_path).map_err(|e| {
        Error::Precondition(format!("cannot read {}: {e}", cert_path.display()))
    })?;
    let cert: hemi::HemisystemCertificate = serde_json::from_slice(&data)
        .map_err(|e| Error::Precondition(format!("malformed certificate: {e}")))?;
    let hist = hemi::verify_certificate(&cert, cache)?;
    println!(
        "p = {}: {} lines re-verified, every point on exactly {} (digest {})",
        cert.p, cert.size, hist.min, cert.digest
    );
    Ok(())
}

fn build_assembly(
    p: u64,
    cache: Option<&std::path::Path>,
) -> Result<(Construction, hemi::Assembly), Error> {
    let con = Construction::build(p, cache)?;
    let assembly = hemi::assemble(&con, false)?;
    Ok((con, assembly))
}

fn cmd_srg(
    p: u64,
    out: &std::path::Path,
    kind: &str,
    cache: Option<&std::path::Path>,
) -> Result<(), Error> {
    if !matches!(kind, "thas" | "cayley" | "both") {
        return Err(Error::Config(format!("unknown graph kind {kind:?}")));
    }
    let (con, assembly) = build_assembly(p, cache)?;
    fs::create_dir_all(out)?;
    if kind == "thas" || kind == "both" {
        let inst = graphs::build_thas_graph(&con, &assembly)?;
        graphs::verify_srg(&inst)?;
        let cert = graphs::make_srg_certificate(&inst, true);
        fs::write(out.join(format!("srg-thas-p{p}.json")), serde_json::to_vec_pretty(&cert)?)?;
        let mut f = fs::File::create(out.join(format!("srg-thas-p{p}-edges.csv")))?;
        graphs::write_edge_list(&inst, &mut f)?;
        let s = inst.spectrum();
        println!(
            "thas: srg({}, {}, {}, {}), spectrum {}, {}^{}, {}^{}",
            cert.v, cert.k, cert.lambda, cert.mu, cert.k, s.theta1, s.m1, s.theta2, s.m2
        );
    }
    if kind == "cayley" || kind == "both" {
        let image = codes::klein_image(&con, 0)?;
        let ovoid = codes::ovoid_points(&image, &assembly);
        let omega = codes::omega_from_set(&con.tower, &ovoid)?;
        let inst = graphs::build_cayley_graph(&con.tower, &omega)?;
        graphs::verify_srg(&inst)?;
        let cert = graphs::make_srg_certificate(&inst, true);
        fs::write(out.join(format!("srg-cayley-p{p}.json")), serde_json::to_vec_pretty(&cert)?)?;
        println!(
            "cayley: srg({}, {}, {}, {}) verified by translation scan",
            cert.v, cert.k, cert.lambda, cert.mu
        );
    }
    Ok(())
}

fn cmd_code(
    p: u64,
    out: &std::path::Path,
    allow_large: bool,
    cache: Option<&std::path::Path>,
) -> Result<(), Error> {
    if p.pow(6) > 100_000_000 && !allow_large {
        return Err(Error::ResourceLimit(format!(
            "q⁶ = {} codewords; pass --allow-large to enumerate",
            p.pow(6)
        )));
    }
    let (con, assembly) = build_assembly(p, cache)?;
    let image = codes::klein_image(&con, 0)?;
    let quadric = codes::fit_quadric(&con.tower, &image.points)?;
    codes::verify_klein_duality(&con, &image, &quadric, 100)?;
    let ovoid = codes::ovoid_points(&image, &assembly);
    let cert = codes::two_intersection_certificate(&con.tower, &ovoid)?;
    let code = codes::build_code(&con.tower, &cert, &ovoid)?;
    fs::create_dir_all(out)?;
    fs::write(
        out.join(format!("projective-set-p{p}.json")),
        serde_json::to_vec_pretty(&cert)?,
    )?;
    fs::write(out.join(format!("code-p{p}.json")), serde_json::to_vec_pretty(&code)?)?;
    let mut f = fs::File::create(out.join(format!("code-p{p}-genmatrix.csv")))?;
    codes::write_generator_matrix(&ovoid, &mut f)?;
    let mut f = fs::File::create(out.join(format!("ovoid-p{p}.csv")))?;
    codes::write_ovoid_csv(&ovoid, &mut f)?;
    println!(
        "projective ({}, {}, {}, {})-set; [{}, {}] code with weights {{{}, {}}}",
        cert.n, cert.k, cert.h1, cert.h2, code.n, code.k, code.w1, code.w2
    );
    Ok(())
}
