use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sapir::gf2::{BitVec, RngState};
use sapir::pir::{generate_pool, pir_fetch_with, BatchAssignment, SessionRecord};
use sapir::retrieval::{decompose_secrecy, execute_plan, execute_retrieval, ContentRequest, Eavesdropper, KeySchedule};
use sapir::sim::{measure_cpop, run_experiment, ExperimentConfig, TranscriptLedger};
use sapir::storage::{load_cluster, save_cluster, Cluster, GroupingPolicy, SystemParams};
use sapir::Error;

#[derive(Parser)]
#[command(
    name = "sapir",
    version,
    about = "Coded GF(2) storage with secret and private retrieval"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a seeded cluster and write it to disk.
    Init {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        n: usize,
        #[arg(long = "M")]
        content_bits: usize,
        #[arg(long, default_value_t = 0.5)]
        bias: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "cluster.sapr")]
        cluster: PathBuf,
        /// Store only the encoded files, not the plaintext contents.
        #[arg(long)]
        no_contents: bool,
        /// Give every group one redundant member so wiretap keys are non-zero.
        #[arg(long)]
        spare: bool,
    },
    /// Direct retrieval of one content through one group.
    Retrieve {
        #[arg(long, default_value = "cluster.sapr")]
        cluster: PathBuf,
        /// Content index, 1-based.
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        group: usize,
        /// Print the ciphertext/key split seen by an eavesdropper missing one link.
        #[arg(long)]
        wiretap: bool,
    },
    /// Private retrieval spread over several groups.
    PirFetch {
        #[arg(long, default_value = "cluster.sapr")]
        cluster: PathBuf,
        /// Content index, 1-based.
        #[arg(long)]
        r: usize,
        /// Number of groups (query batches).
        #[arg(long, default_value_t = 1)]
        groups: usize,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        /// Seed for the query pool and batch shuffle.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the session record for offline collusion analysis.
        #[arg(long)]
        session: Option<PathBuf>,
        /// Fail instead of sending several batches to one group when there
        /// are fewer groups than batches.
        #[arg(long)]
        distinct: bool,
    },
    /// Run an experiment described by a key=value config file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check every invariant of a stored cluster.
    Verify {
        #[arg(long, default_value = "cluster.sapr")]
        cluster: PathBuf,
    },
}

/// A run that did not succeed: either the input was unusable or the data
/// failed a check.
enum Failure {
    Usage(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::MalformedFile { .. }
            | Error::Integrity(_)
            | Error::NoSolution
            | Error::Singular
            | Error::KeySelection { .. }
            | Error::DegenerateRequest => Failure::Invariant(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invariant(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn request(cluster: &Cluster, r: usize) -> Result<ContentRequest, Failure> {
    let m = cluster.params.contents;
    if r == 0 || r > m {
        return Err(Failure::Usage(format!("--r must be between 1 and {m}")));
    }
    Ok(ContentRequest::new(r - 1, m)?)
}

fn check_against_library(cluster: &Cluster, index: usize, got: &BitVec) -> Result<&'static str, Failure> {
    match &cluster.library {
        Some(lib) if lib.get(index) == got => Ok("exact"),
        Some(_) => Err(Failure::Invariant(format!(
            "content {} does not match the library",
            index + 1
        ))),
        None => Ok("unchecked (no plaintext stored)"),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Init {
            m,
            h,
            n,
            content_bits,
            bias,
            seed,
            cluster,
            no_contents,
            spare,
        } => {
            let params = SystemParams::new(n, h, m, content_bits, bias)?;
            let policy = if spare {
                GroupingPolicy::WithSpare
            } else {
                GroupingPolicy::Minimal
            };
            let mut built = Cluster::build_with(params, seed, policy)?;
            if no_contents {
                built = built.encoded_only();
            }
            save_cluster(&cluster, &built)?;
            println!("wrote {}", cluster.display());
            println!("servers {n}, files per server {h}, contents {m}, content bits {content_bits}");
            for g in &built.groups {
                let ids: Vec<String> = g.member_ids.iter().map(usize::to_string).collect();
                println!(
                    "group {}: servers [{}], coordinator {}",
                    g.group_id,
                    ids.join(", "),
                    g.coordinator_id
                );
            }
        }
        Command::Retrieve {
            cluster,
            r,
            group,
            wiretap,
        } => {
            let c = load_cluster(&cluster)?;
            if group >= c.groups.len() {
                return Err(Failure::Usage(format!("--group must be below {}", c.groups.len())));
            }
            let req = request(&c, r)?;
            let mut ledger = TranscriptLedger::new();
            let content = if wiretap {
                let g = c.group(group);
                let schedule = KeySchedule::build(g)?;
                let plan = schedule.plan(req.index);
                let content = execute_plan(&c, group, &req, plan, &mut ledger);
                let eve = Eavesdropper::missing_last(g);
                let seen = eve.observe(&ledger, c.params.content_bits);
                println!("unobserved link: server {} -> user", eve.unobserved);
                println!("wiretapped links: {}", seen.links_tapped);
                println!("ciphertext: {}", seen.ciphertext.to_hex());
                if c.library.is_some() {
                    let d = decompose_secrecy(&c, group, &req, plan)?;
                    println!("key weight: {} of {}", d.key.weight(), d.key.len());
                    println!("ciphertext xor key == content: {}", d.identity_holds());
                    if !d.identity_holds() || d.ciphertext != seen.ciphertext {
                        return Err(Failure::Invariant("secrecy decomposition is inconsistent".into()));
                    }
                }
                content
            } else {
                execute_retrieval(&c, group, &req, &mut ledger)?
            };
            println!("content {r}: {}", content.to_hex());
            println!("check: {}", check_against_library(&c, req.index, &content)?);
            println!("cPoP: {}", measure_cpop(&ledger, c.params.content_bits));
        }
        Command::PirFetch {
            cluster,
            r,
            groups,
            epsilon,
            seed,
            session,
            distinct,
        } => {
            let c = load_cluster(&cluster)?;
            let req = request(&c, r)?;
            let mut rng = RngState::new(seed);
            let pool = generate_pool(c.params.contents, epsilon, &mut rng)?;
            let mut ledger = TranscriptLedger::new();
            let assignment = if distinct {
                BatchAssignment::Distinct
            } else {
                BatchAssignment::RoundRobin
            };
            let fetch = pir_fetch_with(&c, &pool, &req, groups, assignment, &mut rng, &mut ledger)?;
            if fetch.session.a() > c.groups.len() {
                eprintln!(
                    "note: {} batches over {} groups; a group that serves several batches sees all of them",
                    fetch.session.a(),
                    c.groups.len()
                );
            }
            if let Some(path) = session {
                std::fs::write(&path, SessionRecord::new(&pool, &fetch).export())
                    .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
            }
            let sizes: Vec<String> = fetch.session.batches.iter().map(|b| b.len().to_string()).collect();
            println!("pool: {} queries, spanning after {}", pool.queries.len(), pool.attained);
            println!("batches: [{}]", sizes.join(", "));
            println!("content {r}: {}", fetch.content.to_hex());
            println!("check: {}", check_against_library(&c, req.index, &fetch.content)?);
            println!("cPoP: {}", measure_cpop(&ledger, c.params.content_bits));
        }
        Command::Experiment { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let csv = run_experiment(&cfg)?;
            match &cfg.output {
                Some(path) => println!("wrote {}", path.display()),
                None => print!("{csv}"),
            }
        }
        Command::Verify { cluster } => {
            let c = load_cluster(&cluster)?;
            let mut checked = 0;
            if let Some(lib) = &c.library {
                for g in 0..c.groups.len() {
                    for index in 0..c.params.contents {
                        let req = ContentRequest::new(index, c.params.contents)?;
                        let got = execute_retrieval(&c, g, &req, &mut TranscriptLedger::new())?;
                        if &got != lib.get(index) {
                            return Err(Failure::Invariant(format!(
                                "group {g} returns the wrong bits for content {}",
                                index + 1
                            )));
                        }
                        checked += 1;
                    }
                }
            }
            println!(
                "ok: {} servers, {} groups, {checked} round trips checked",
                c.servers.len(),
                c.groups.len()
            );
        }
    }
    Ok(())
}
