//! Command-line front end: braid presentations, augmentation ideals,
//! HOMFLYPT values, the unknot verification chain, and Markov-move checks.
//!
//! Exit codes: 0 success, 1 mathematical disagreement, 2 resource limit,
//! 3 usage error.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use braidaug::braid::{closure, BraidWord};
use braidaug::homfly::{colored_unknot, homflypt};
use braidaug::ideal::{augmentation_ideal, ideal_equal, Elimination, GbConfig, IdealError};
use braidaug::ngalg::{
    braid_operators, build_d_beta_matrix, build_d_matrix, invert_diagonal, psi, relations,
    AugRing, LambdaNuSign, LinkMu, PresentOptions, PsiGSign,
};
use braidaug::poly::{table_to_json, LaurentPoly, VarTable};
use braidaug::qtorus::{annihilates, classical_limit, classical_table, parse_operator, TorusElem};

#[derive(Parser)]
#[command(
    name = "braidaug",
    about = "Augmentation ideals of braid closures and quantum-torus recursion checks",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the defining relations of the braid closure's degree-0 presentation
    Present {
        /// Braid word as space-separated signed generator indices, e.g. "1 1 1"
        #[arg(allow_hyphen_values = true)]
        braid: String,
        #[command(flatten)]
        common: Common,
    },
    /// Eliminate the a-variables and print the augmentation ideal generators
    Augpoly {
        #[arg(allow_hyphen_values = true)]
        braid: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run the unknot chain: operator, annihilation grid, classical limit, ideal match
    VerifyUnknot {
        #[command(flatten)]
        common: Common,
    },
    /// Print the HOMFLYPT polynomial of the braid closure
    Homfly {
        #[arg(allow_hyphen_values = true)]
        braid: String,
        #[command(flatten)]
        common: Common,
    },
    /// Check augmentation-ideal invariance under conjugation and stabilization
    MarkovTest {
        #[arg(allow_hyphen_values = true)]
        braid: String,
        /// Compare against a second braid word instead of applying Markov moves
        #[arg(long, allow_hyphen_values = true)]
        against: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Number of strands (inferred from the largest generator index if omitted)
    #[arg(short = 'n', long = "strands")]
    strands: Option<usize>,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
    /// S-pair budget for Groebner runs
    #[arg(long, default_value_t = 200_000)]
    spair_budget: usize,
    /// Wall-clock limit in seconds for Groebner runs
    #[arg(long, default_value_t = 60)]
    timeout_s: u64,
    /// Sign of the nu-exponent in the twist matrix framing entry
    #[arg(long, value_enum, default_value_t = LambdaSign::Neg)]
    lambda_sign: LambdaSign,
    /// Sign of the (-g)-exponent in the strand rescaling automorphism
    #[arg(long, value_enum, default_value_t = PsiSign::DiMinusDj)]
    psi_sign: PsiSign,
    /// Sign of the quantum-torus commutation exponent
    #[arg(long, value_enum, default_value_t = TorusSign::Neg)]
    torus_sign: TorusSign,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum LambdaSign {
    /// nu^(-2 wr) (default, test-selected)
    Neg,
    /// nu^(+2 wr) (negative control)
    Pos,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum PsiSign {
    /// (-g)^(d(i)-d(j)) (default, test-selected)
    DiMinusDj,
    /// (-g)^(d(j)-d(i)) (negative control)
    DjMinusDi,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum TorusSign {
    /// Lam nu = q^-1 nu Lam (default, action-compatible)
    Neg,
    /// Lam nu = q^+1 nu Lam (negative control)
    Pos,
}

impl Common {
    fn gb_config(&self) -> GbConfig {
        GbConfig {
            max_pairs: self.spair_budget,
            timeout: Duration::from_secs(self.timeout_s),
        }
    }

    fn present_options(&self) -> PresentOptions {
        PresentOptions {
            lambda_nu_sign: match self.lambda_sign {
                LambdaSign::Neg => LambdaNuSign::NegTwoWr,
                LambdaSign::Pos => LambdaNuSign::PosTwoWr,
            },
            link_mu: LinkMu::Row,
            include_ch1: false,
        }
    }

    fn psi_g_sign(&self) -> PsiGSign {
        match self.psi_sign {
            PsiSign::DiMinusDj => PsiGSign::DiMinusDj,
            PsiSign::DjMinusDi => PsiGSign::DjMinusDi,
        }
    }
}

/// Failure carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }

    fn math(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<IdealError> for Failure {
    fn from(e: IdealError) -> Self {
        let code = match &e {
            IdealError::Resource(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn parse_braid(text: &str, strands: Option<usize>) -> Result<BraidWord, Failure> {
    BraidWord::parse(text, strands).map_err(|e| Failure::usage(format!("bad braid word: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let kind = e.kind();
            let _ = e.print();
            return if kind == ErrorKind::DisplayHelp || kind == ErrorKind::DisplayVersion {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            };
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Present { braid, common } => cmd_present(&braid, &common),
        Cmd::Augpoly { braid, common } => cmd_augpoly(&braid, &common),
        Cmd::VerifyUnknot { common } => cmd_verify_unknot(&common),
        Cmd::Homfly { braid, common } => cmd_homfly(&braid, &common),
        Cmd::MarkovTest {
            braid,
            against,
            common,
        } => cmd_markov(&braid, against.as_deref(), &common),
    }
}

fn cmd_present(braid: &str, common: &Common) -> Result<(), Failure> {
    let word = parse_braid(braid, common.strands)?;
    let pres = relations(&word, &common.present_options())
        .map_err(|e| Failure::math(e.to_string()))?;
    if common.json {
        println!("{}", pres.to_json());
        return Ok(());
    }
    let table = pres.ring.table();
    let names: Vec<&str> = (0..table.len()).map(|i| table.name(i)).collect();
    println!("ring: {}", names.join(", "));
    println!("relations ({}):", pres.gens.len());
    for g in &pres.gens {
        println!("  {g}");
    }
    Ok(())
}

fn elimination_to_json(e: &Elimination) -> serde_json::Value {
    json!({
        "vars": table_to_json(&e.kept_table),
        "gens": e.gens.iter().map(|g| g.to_json()).collect::<Vec<_>>(),
    })
}

fn cmd_augpoly(braid: &str, common: &Common) -> Result<(), Failure> {
    let word = parse_braid(braid, common.strands)?;
    let pres = relations(&word, &common.present_options())
        .map_err(|e| Failure::math(e.to_string()))?;
    let elim = match augmentation_ideal(&pres, &common.gb_config()) {
        Ok(e) => e,
        Err(IdealError::Resource(msg)) => {
            println!("incomplete: {msg}");
            return Err(Failure {
                code: 2,
                message: msg,
            });
        }
        Err(e) => return Err(e.into()),
    };
    if common.json {
        println!("{}", elimination_to_json(&elim));
        return Ok(());
    }
    let table = &elim.kept_table;
    let names: Vec<&str> = (0..table.len()).map(|i| table.name(i)).collect();
    println!("ring: {}", names.join(", "));
    println!("generators ({}):", elim.gens.len());
    for g in &elim.gens {
        println!("  {g}");
    }
    Ok(())
}

fn cmd_homfly(braid: &str, common: &Common) -> Result<(), Failure> {
    let word = parse_braid(braid, common.strands)?;
    let value = homflypt(&word).map_err(|e| Failure::math(e.to_string()))?;
    if common.json {
        println!("{}", value.to_json());
    } else {
        println!("{value}");
    }
    Ok(())
}

/// Strip the monomial-unit and content normalization so ideal generators
/// defined up to units compare directly.
fn normalized(p: &LaurentPoly) -> LaurentPoly {
    let shift: Vec<i32> = p.min_exps().iter().map(|&e| -e).collect();
    p.mul_mono(&shift).primitive_part()
}

fn same_up_to_sign(a: &LaurentPoly, b: &LaurentPoly) -> bool {
    let a = normalized(a);
    let b = normalized(b);
    a == b || a == b.neg()
}

fn cmd_verify_unknot(common: &Common) -> Result<(), Failure> {
    let mut all_pass = true;
    let mut step = |name: &str, ok: bool| {
        println!("{name}: {}", if ok { "pass" } else { "fail" });
        if !ok {
            all_pass = false;
        }
    };

    // 1. Build the recursion operator under the configured commutation sign.
    let op = match common.torus_sign {
        TorusSign::Neg => parse_operator("nu - nu^-1 - L*(g*nu^-1 - g^-1*nu)", 1),
        // normal-ordering L*(g nu^-1 - g^-1 nu) under Lam nu = q nu Lam
        TorusSign::Pos => parse_operator("nu - nu^-1 - (q^-1*g*nu^-1 - q*g^-1*nu)*L", 1),
    }
    .map_err(|e| Failure::math(e.to_string()))?;
    step("operator", op.num_terms() == 4);

    // 2. Annihilation of the colored unknot values, symbolic with g = q^N.
    let report = annihilates(&op, &colored_unknot(), &[(1, 8)], 3..=6)
        .map_err(|e| Failure::math(e.to_string()))?;
    step("annihilation", report.all_zero());

    // 3. Classical limit times nu equals the unknot relation times -nu^2 Lam.
    let classical_ok = (|| -> Option<bool> {
        let lim = classical_limit(&op).ok()?;
        let t = classical_table(1);
        let lhs = &lim * &LaurentPoly::var(&t, 1);
        let pres = relations(&BraidWord::new(1, vec![]).ok()?, &common.present_options()).ok()?;
        let map: Vec<Option<usize>> = (0..pres.ring.table().len())
            .map(|i| t.index(pres.ring.table().name(i)))
            .collect();
        let rel = pres.gens.first()?.map_table(&t, &map).ok()?;
        Some(same_up_to_sign(&lhs, &rel))
    })()
    .unwrap_or(false);
    step("classical-limit", classical_ok);

    // 4. The eliminated unknot augmentation ideal matches the same relation.
    let ideal_ok = (|| -> Option<bool> {
        let pres = relations(&BraidWord::new(1, vec![]).ok()?, &common.present_options()).ok()?;
        let elim = augmentation_ideal(&pres, &common.gb_config()).ok()?;
        if elim.gens.len() != 1 {
            return Some(false);
        }
        let t = classical_table(1);
        let map: Vec<Option<usize>> = (0..elim.kept_table.len())
            .map(|i| t.index(elim.kept_table.name(i)))
            .collect();
        let gen = elim.gens[0].map_table(&t, &map).ok()?;
        let lim = classical_limit(&unknot_op_default()).ok()?;
        let lhs = &lim * &LaurentPoly::var(&t, 1);
        Some(same_up_to_sign(&gen, &lhs))
    })()
    .unwrap_or(false);
    step("ideal-match", ideal_ok);

    // 5. Strand-rescaling conjugation of the transport matrices (trefoil).
    let psi_ok = (|| -> Option<bool> {
        let w = BraidWord::new(2, vec![1, 1, 1]).ok()?;
        let c = closure(&w);
        let ring = AugRing::from_closure(&c).ok()?;
        let ops = braid_operators(&ring, &w);
        let p = psi(&ring, &c, common.psi_g_sign());
        let d = build_d_matrix(&ring, &c);
        let d_beta = build_d_beta_matrix(&ring, &c);
        let left_ok = p.apply_matrix(&ops.phi_l) == d_beta.mul(&ops.phi_l).mul(&invert_diagonal(&d));
        let right_ok =
            p.apply_matrix(&ops.phi_r) == d.mul(&ops.phi_r).mul(&invert_diagonal(&d_beta));
        Some(left_ok && right_ok)
    })()
    .unwrap_or(false);
    step("psi-conjugation", psi_ok);

    if all_pass {
        Ok(())
    } else {
        Err(Failure::math("verification chain failed".to_string()))
    }
}

fn unknot_op_default() -> TorusElem {
    braidaug::qtorus::unknot_operator()
}

/// Remap generators over `from` into `to` by variable name.
fn remap_gens(
    gens: &[LaurentPoly],
    from: &Arc<VarTable>,
    to: &Arc<VarTable>,
) -> Option<Vec<LaurentPoly>> {
    let map: Vec<Option<usize>> = (0..from.len()).map(|i| to.index(from.name(i))).collect();
    gens.iter().map(|g| g.map_table(to, &map).ok()).collect()
}

fn cmd_markov(braid: &str, against: Option<&str>, common: &Common) -> Result<(), Failure> {
    let word = parse_braid(braid, common.strands)?;
    let opts = common.present_options();
    let cfg = common.gb_config();
    let base = augmentation_ideal(&relations(&word, &opts).map_err(|e| Failure::math(e.to_string()))?, &cfg)?;

    let compare = |name: &str, other: &BraidWord| -> Result<bool, Failure> {
        let elim = augmentation_ideal(
            &relations(other, &opts).map_err(|e| Failure::math(e.to_string()))?,
            &cfg,
        )?;
        let mapped = remap_gens(&elim.gens, &elim.kept_table, &base.kept_table)
            .ok_or_else(|| Failure::math("kept variables differ between the two closures".to_string()))?;
        let equal = ideal_equal(&base.kept_table, &base.gens, &mapped, &cfg)?;
        println!("{name}: {}", if equal { "equal" } else { "unequal" });
        Ok(equal)
    };

    if let Some(other_text) = against {
        let other = parse_braid(other_text, None)?;
        compare("against", &other)?;
        return Ok(());
    }

    let n = word.strands();
    let conjugator = BraidWord::new(n.max(2), vec![1]).map_err(|e| Failure::usage(e.to_string()))?;
    let conjugated = if n >= 2 {
        word.conjugate(&conjugator)
            .map_err(|e| Failure::usage(e.to_string()))?
    } else {
        word.clone()
    };
    let mut ok = compare("conjugation", &conjugated)?;
    ok &= compare("stabilization+", &word.stabilize(true))?;
    ok &= compare("stabilization-", &word.stabilize(false))?;
    if ok {
        Ok(())
    } else {
        Err(Failure::math("augmentation ideal not Markov invariant".to_string()))
    }
}
