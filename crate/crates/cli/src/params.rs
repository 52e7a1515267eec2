use asep_core::exact::{fmt_rat, rat_to_f64};
use asep_core::{parse_rat, AsepParams, AwFamily, Rat};
use clap::Args;

use crate::CliError;

pub fn rat_arg(s: &str) -> Result<Rat, String> {
    parse_rat(s).map_err(|_| format!("expected an integer or p/q, got {s:?}"))
}

/// Parameters in either the Askey-Wilson form `(a, b, c, d)` or the rate
/// form `(α, β, γ, δ)`, plus `q`.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, value_parser = rat_arg, allow_hyphen_values = true)]
    pub a: Option<Rat>,
    #[arg(long, value_parser = rat_arg, allow_hyphen_values = true)]
    pub b: Option<Rat>,
    #[arg(long, value_parser = rat_arg, allow_hyphen_values = true)]
    pub c: Option<Rat>,
    #[arg(long, value_parser = rat_arg, allow_hyphen_values = true)]
    pub d: Option<Rat>,
    #[arg(long, value_parser = rat_arg, allow_hyphen_values = true)]
    pub alpha: Option<Rat>,
    #[arg(long, value_parser = rat_arg, allow_hyphen_values = true)]
    pub beta: Option<Rat>,
    #[arg(long, value_parser = rat_arg, allow_hyphen_values = true)]
    pub gamma: Option<Rat>,
    #[arg(long, value_parser = rat_arg, allow_hyphen_values = true)]
    pub delta: Option<Rat>,
    #[arg(long, value_parser = rat_arg, allow_hyphen_values = true)]
    pub q: Option<Rat>,
}

impl ParamArgs {
    fn aw_given(&self) -> [Option<&Rat>; 4] {
        [self.a.as_ref(), self.b.as_ref(), self.c.as_ref(), self.d.as_ref()]
    }

    fn rates_given(&self) -> [Option<&Rat>; 4] {
        [
            self.alpha.as_ref(),
            self.beta.as_ref(),
            self.gamma.as_ref(),
            self.delta.as_ref(),
        ]
    }

    fn q(&self) -> Result<Rat, CliError> {
        self.q
            .clone()
            .ok_or_else(|| CliError::Usage("missing --q".into()))
    }

    /// The Askey-Wilson quadruple, if that entry mode was used.
    pub fn aw(&self) -> Result<[Rat; 4], CliError> {
        if self.rates_given().iter().any(Option::is_some) {
            return Err(CliError::Usage(
                "this command takes --a --b --c --d, not rates".into(),
            ));
        }
        let names = ["--a", "--b", "--c", "--d"];
        let v = self.aw_given();
        for (name, x) in names.iter().zip(v) {
            if x.is_none() {
                return Err(CliError::Usage(format!("missing {name}")));
            }
        }
        Ok(v.map(|x| x.cloned().unwrap()))
    }

    pub fn family(&self) -> Result<AwFamily, CliError> {
        let [a, b, c, d] = self.aw()?;
        AwFamily::new(a, b, c, d, self.q()?).map_err(|e| CliError::Usage(format!("--q: {e}")))
    }

    /// ASEP parameters from exactly one of the two entry modes.
    pub fn asep(&self) -> Result<AsepParams, CliError> {
        let aw = self.aw_given();
        let rates = self.rates_given();
        let any_aw = aw.iter().any(Option::is_some);
        let any_rates = rates.iter().any(Option::is_some);
        let q = self.q()?;
        match (any_aw, any_rates) {
            (true, true) => Err(CliError::Usage(
                "give either --a --b --c --d or --alpha --beta --gamma --delta, not both".into(),
            )),
            (false, false) => Err(CliError::Usage("missing parameters".into())),
            (true, false) => {
                let [a, b, c, d] = self.aw()?;
                AsepParams::from_awparams(a, b, c, d, q).map_err(|e| CliError::Usage(e.to_string()))
            }
            (false, true) => {
                let names = ["--alpha", "--beta", "--gamma", "--delta"];
                for (name, x) in names.iter().zip(rates) {
                    if x.is_none() {
                        return Err(CliError::Usage(format!("missing {name}")));
                    }
                }
                let [al, be, ga, de] = rates.map(|x| x.cloned().unwrap());
                AsepParams::from_rates(al, be, ga, de, q).map_err(|e| CliError::Usage(e.to_string()))
            }
        }
    }
}

/// Float rendering with 15 significant digits.
pub fn sig15(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:.14e}")
    }
}

pub fn show(x: &Rat) -> String {
    format!("{} ({})", fmt_rat(x), sig15(rat_to_f64(x)))
}
