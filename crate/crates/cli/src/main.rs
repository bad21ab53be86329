use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use jetcalc::calculus::total_derivative;
use jetcalc::cascade::{
    exceptional_branches, order0_residuals, polynomial_basis, run_order0_in, run_order1_in,
    run_order2_reduction, verify_general_solution,
};
use jetcalc::coeffring::{Branch, Param, Rational};
use jetcalc::conslaw::{divergence_residual, verify_basis_laws, ConservedVector};
use jetcalc::determining::{determining_expression, split_system, Ansatz, Shell, Stats};
use jetcalc::equation::{
    apply_scaling, build_delta, build_f, build_j, lagrangian, normalize, potential_delta,
    unnormalized_delta, variational_check, Coefficients, FamilySpec, Normalization,
    ScalingTransform, Verdict,
};
use jetcalc::jetexpr::{parse_expr, parse_expr_with, parse_scalar, Bindings, Indep};
use jetcalc::report::Report;
use jetcalc::{Error, Result};

#[derive(Parser)]
#[command(name = "jetcalc", version, about = "Multiplier and conservation-law engine for the fifth-order KP family")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Config {
    #[arg(long, global = true)]
    c: Option<String>,
    #[arg(long, global = true)]
    e: Option<String>,
    #[arg(long, global = true)]
    f: Option<String>,
    #[arg(long, global = true)]
    g: Option<String>,
    /// +1 or -1; symbolic when omitted.
    #[arg(long, global = true, allow_hyphen_values = true)]
    sigma: Option<String>,
    /// Comma-separated relations over c, e, f, g, e.g. "g=0, 27e=14f".
    #[arg(long, global = true)]
    branch: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnsatzArg {
    General,
    Linear,
    Polynomial,
}

#[derive(Subcommand)]
enum Command {
    /// Print the equation, its fluxes, potential form and Lagrangian.
    Expand,
    /// Apply a scaling to unnormalized coefficients.
    Scale {
        /// c,d,e,f,g,sigma of the unnormalized equation.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        mu: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        nu: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        rho: String,
    },
    /// Scale to d = 1 and sigma = +-1.
    Normalize {
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
    },
    /// Lagrangian check on the potential form.
    Variational,
    /// Determining expression and system for a multiplier ansatz.
    Derive {
        #[arg(long, default_value_t = 1)]
        order: u8,
        /// Shape of the order-one ansatz.
        #[arg(long, value_enum, default_value_t = AnsatzArg::General)]
        ansatz: AnsatzArg,
        /// Rewrite u_tx and its consequences before splitting.
        #[arg(long)]
        on_shell: bool,
        /// Print every equation of the split system.
        #[arg(long)]
        system: bool,
    },
    /// Run a classification cascade.
    Classify {
        #[arg(long, default_value_t = 1)]
        order: u8,
    },
    /// The six polynomial multipliers with certification.
    Basis,
    /// The six shipped conserved vectors with divergence checks.
    Conslaws,
    /// Check a user-supplied multiplier and conserved vector.
    VerifyCl {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// The second-order reduction.
    CheckOrder2,
    /// The exceptional sub-branches and their cascade outcomes.
    Branches,
}

fn rational(s: &str) -> Result<Rational> {
    parse_scalar(s)?
        .as_constant()
        .ok_or_else(|| Error::Invalid(format!("`{s}` is not a number")))
}

fn rationals(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(|p| rational(p.trim())).collect()
}

impl Config {
    fn branch(&self) -> Result<Branch> {
        let mut b = match &self.branch {
            Some(text) => Branch::parse(text)?,
            None => Branch::new(),
        };
        for (p, v) in [(Param::C, &self.c), (Param::E, &self.e), (Param::F, &self.f), (Param::G, &self.g)] {
            if let Some(v) = v {
                b = b.with_value(p, rational(v)?);
            }
        }
        b.validate()?;
        Ok(b)
    }

    fn spec(&self) -> Result<FamilySpec> {
        let spec = FamilySpec::from_branch(&self.branch()?)?;
        match &self.sigma {
            Some(s) => spec.with_value(Param::Sigma, rational(s)?),
            None => Ok(spec),
        }
    }

    fn describe(&self, r: &mut Report) -> Result<()> {
        r.config("family", self.spec()?);
        r.config("branch", self.branch()?);
        Ok(())
    }
}

fn coefficients(s: &str) -> Result<Coefficients> {
    let v = rationals(s)?;
    let [c, d, e, f, g, sigma]: [Rational; 6] = v
        .try_into()
        .map_err(|_| Error::Invalid("--coeffs needs six numbers c,d,e,f,g,sigma".into()))?;
    Ok(Coefficients::new(c, d, e, f, g, sigma))
}

fn expand(cfg: &Config) -> Result<Report> {
    let spec = cfg.spec()?;
    let mut r = Report::new("expand");
    cfg.describe(&mut r)?;
    let (f, j) = (build_f(&spec), build_j(&spec));
    r.result("Delta", build_delta(&spec));
    r.result("F", &f);
    r.result("J", &j);
    r.result("potential", potential_delta(&spec));
    r.result("L", lagrangian(&spec));
    let dj = &total_derivative(&j, Indep::X) + &f;
    r.check("D_x J + F = 0", dj.is_zero(), dj);
    Ok(r)
}

fn scale(coeffs: &str, lambda: &str, mu: &str, nu: &str, rho: &str) -> Result<Report> {
    let k = coefficients(coeffs)?;
    let tr = ScalingTransform::new(rational(lambda)?, rational(mu)?, rational(nu)?, rational(rho)?)?;
    let out = apply_scaling(&tr, &k)?;
    let mut r = Report::new("scale");
    r.config("coefficients", &k);
    r.config("transform", format!("lambda={}, mu={}, nu={}, rho={}", tr.lambda, tr.mu, tr.nu, tr.rho));
    r.result("scaled", &out);
    r.result("equation", unnormalized_delta(&out));
    let back = apply_scaling(&tr.inverse(), &out)?;
    r.check("inverse restores", back == k, &back);
    Ok(r)
}

fn normalize_cmd(coeffs: &str, lambda: Option<&str>) -> Result<Report> {
    let k = coefficients(coeffs)?;
    let lambda = lambda.map(rational).transpose()?;
    let mut r = Report::new("normalize");
    r.config("coefficients", &k);
    match normalize(&k, lambda)? {
        Normalization::Rational { transform, coefficients, epsilon } => {
            r.result("transform", format!(
                "lambda={}, mu={}, nu={}, rho={}",
                transform.lambda, transform.mu, transform.nu, transform.rho
            ));
            r.result("epsilon", epsilon);
            r.result("normalized", &coefficients);
            r.check("d = 1", coefficients.d == Rational::from_integer(1.into()), &coefficients.d);
        }
        Normalization::Irrational { epsilon, nu, mu_squared } => {
            r.result("epsilon", epsilon);
            r.result("nu", nu);
            r.result("mu^2 (not a rational square)", mu_squared);
        }
    }
    Ok(r)
}

fn variational(cfg: &Config) -> Result<Report> {
    let spec = cfg.spec()?;
    let v = variational_check(&spec)?;
    let mut r = Report::new("variational");
    cfg.describe(&mut r)?;
    for (m, c) in &v.matching {
        r.result(format!("matching [{m}]"), c);
    }
    r.result("compatibility f - 2e", &v.compatibility);
    r.result("sign", v.sign);
    match &v.verdict {
        Verdict::Variational => {
            r.result("verdict", "variational");
        }
        Verdict::Nonvariational { witness } => {
            r.result("verdict", "nonvariational");
            r.result("witness", witness);
        }
    }
    Ok(r)
}

fn derive(cfg: &Config, order: u8, shape: AnsatzArg, on_shell: bool, system: bool) -> Result<Report> {
    let spec = cfg.spec()?;
    let ansatz = match (order, shape) {
        (0, _) => Ansatz::order0(),
        (1, AnsatzArg::General) => Ansatz::order1_general(),
        (1, AnsatzArg::Linear) => Ansatz::order1_linear(),
        (1, AnsatzArg::Polynomial) => Ansatz::order1_polynomial(),
        (2, _) => Ansatz::order2_general(),
        _ => return Err(Error::Invalid(format!("order {order} is not supported"))),
    };
    let shell = if on_shell { Shell::On } else { Shell::Off };
    let e = determining_expression(&ansatz, &spec, shell)?;
    let stats = Stats::of(&e);
    let sys = split_system(&e, &ansatz);
    let mut r = Report::new("derive");
    cfg.describe(&mut r)?;
    r.config("ansatz", &ansatz);
    r.config("shell", if on_shell { "on" } else { "off" });
    r.result("monomials", stats.monomials);
    r.result("expanded terms", stats.expanded_terms);
    let degs: Vec<String> = stats.max_degrees.iter().map(|(j, n)| format!("{j}^{n}")).collect();
    r.result("max degrees", degs.join(" "));
    r.result("equations", sys.len());
    let opaque: Vec<String> = sys.opaque.iter().map(|j| j.to_string()).collect();
    if !opaque.is_empty() {
        r.result("unsplit jets", opaque.join(" "));
    }
    if system {
        for (k, eq) in &sys.equations {
            r.residual(format!("[{k}] {eq} = 0"));
        }
    }
    Ok(r)
}

fn classify(cfg: &Config, order: u8) -> Result<Report> {
    let branch = cfg.branch()?;
    let spec = cfg.spec()?;
    let result = match order {
        0 => run_order0_in(&branch, &spec)?,
        1 => run_order1_in(&branch, &spec)?,
        _ => return Err(Error::Invalid("classify supports orders 0 and 1; use check-order2".into())),
    };
    let mut r = Report::new("classify");
    cfg.describe(&mut r)?;
    r.config("order", order);
    r.classification(&result);
    if result.status.is_closed() {
        r.result("result", result.summary());
    }
    Ok(r)
}

fn basis(cfg: &Config) -> Result<Report> {
    let spec = cfg.spec()?;
    let mut r = Report::new("basis");
    cfg.describe(&mut r)?;
    for (i, q) in polynomial_basis().iter().enumerate() {
        let q = spec.specialize(q);
        let [a, b] = order0_residuals(&q).map(|e| spec.specialize(&e));
        r.check(format!("Q{i} = {q}"), a.is_zero() && b.is_zero(), format!("Q_xx = {a}, Q_xt + sigma*Q_yy = {b}"));
    }
    let g = verify_general_solution();
    r.check("general solution", g.verified(), &g.q);
    Ok(r)
}

fn conslaws(cfg: &Config) -> Result<Report> {
    let spec = cfg.spec()?;
    let mut r = Report::new("conslaws");
    cfg.describe(&mut r)?;
    for c in verify_basis_laws(&spec)? {
        r.check(
            format!("law {} (Q = {})", c.index, c.q),
            c.verified(),
            format!("residual {}, matches construction: {}", c.residual, c.matches_construction),
        );
    }
    Ok(r)
}

fn verify_cl(cfg: &Config, q: &str, t: &str, x: &str, y: &str) -> Result<Report> {
    let spec = cfg.spec()?;
    let bindings: Bindings = [("F".to_string(), build_f(&spec)), ("J".to_string(), build_j(&spec))].into();
    let p = |s: &str| parse_expr_with(s, &bindings).map(|e| spec.specialize(&e));
    let q = spec.specialize(&parse_expr(q)?);
    let cv = ConservedVector { t: p(t)?, x: p(x)?, y: p(y)? };
    let res = divergence_residual(&cv, &q, &spec);
    let mut r = Report::new("verify-cl");
    cfg.describe(&mut r)?;
    r.config("Q", &q);
    r.result("T", &cv.t);
    r.result("X", &cv.x);
    r.result("Y", &cv.y);
    r.check("D_t T + D_x X + D_y Y - Q*Delta = 0", res.is_zero(), &res);
    Ok(r)
}

fn check_order2() -> Result<Report> {
    let rep = run_order2_reduction()?;
    let mut r = Report::new("check-order2");
    r.result("determining monomials", rep.stats.monomials);
    for row in &rep.rows {
        r.check(format!("[{}]", row.key), row.verified, format!("{} (expected {})", row.obtained, row.expected));
    }
    for c in &rep.conclusions {
        r.residual(c);
    }
    r.result("first order [u_x7] from u_x summand", &rep.contrast.from_u_x);
    r.result("first order [u_x7] from u_x6 summand", &rep.contrast.from_u_x6);
    r.check("first order contributions cancel", rep.contrast.total.is_zero(), &rep.contrast.total);
    Ok(r)
}

fn branches() -> Result<Report> {
    let mut r = Report::new("branches");
    for x in exceptional_branches() {
        let res = run_order1_in(&x.branch, &FamilySpec::from_branch(&x.branch)?)?;
        let open = matches!(&res.status, jetcalc::cascade::Status::OpenBranch { factor, .. } if *factor == x.factor);
        r.check(format!("{{{}}}", x.branch), open, &res.status);
        if x.order0_enlarged {
            let o0 = run_order0_in(&x.branch, &FamilySpec::from_branch(&x.branch)?)?;
            r.result(format!("{{{}}} order 0", x.branch), &o0.status);
        }
    }
    Ok(r)
}

fn run(cli: &Cli) -> Result<Report> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Expand => expand(cfg),
        Command::Scale { coeffs, lambda, mu, nu, rho } => scale(coeffs, lambda, mu, nu, rho),
        Command::Normalize { coeffs, lambda } => normalize_cmd(coeffs, lambda.as_deref()),
        Command::Variational => variational(cfg),
        Command::Derive { order, ansatz, on_shell, system } => derive(cfg, *order, *ansatz, *on_shell, *system),
        Command::Classify { order } => classify(cfg, *order),
        Command::Basis => basis(cfg),
        Command::Conslaws => conslaws(cfg),
        Command::VerifyCl { q, t, x, y } => verify_cl(cfg, q, t, x, y),
        Command::CheckOrder2 => check_order2(),
        Command::Branches => branches(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = match cli.config.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json() + "\n",
    };
    match &cli.config.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed checks: {}", report.failures.join(", "));
        ExitCode::FAILURE
    }
}
