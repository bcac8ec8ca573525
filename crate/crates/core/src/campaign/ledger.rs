use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::dfnn::DfnnHyperparameters;
use crate::evaluation::CvResult;
use crate::searchspace::{HyperparameterSetting, Scored, SettingId};

pub const LEDGER_COLUMNS: [&str; 23] = [
    "cycle_label",
    "setting_id",
    "nhl",
    "nodes",
    "af",
    "ki",
    "opt",
    "lr",
    "mom",
    "decay",
    "dropout",
    "epochs",
    "batch_size",
    "l1",
    "l2",
    "auc_f1",
    "auc_f2",
    "auc_f3",
    "auc_f4",
    "auc_f5",
    "mean_test_auc",
    "train_seconds",
    "diverged",
];

#[derive(Debug, thiserror::Error)]
pub enum LedgerError {
    #[error("ledger line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("ledger has no rows")]
    Empty,
    #[error("setting {0} recorded twice in one cycle")]
    DuplicateSetting(SettingId),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// One evaluated setting.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerRow {
    pub cycle_label: String,
    pub setting: HyperparameterSetting,
    pub cv: CvResult,
}

impl Scored for LedgerRow {
    fn setting_id(&self) -> &SettingId {
        &self.setting.id
    }

    fn hyperparameters(&self) -> &DfnnHyperparameters {
        &self.setting.hp
    }

    fn score(&self) -> f64 {
        self.cv.mean_test_auc
    }
}

/// All rows of one cycle, in setting id order.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignLedger {
    pub cycle_label: String,
    pub seed: u64,
    pub dataset_fingerprint: String,
    pub rows: Vec<LedgerRow>,
}

impl CampaignLedger {
    /// Sorts `rows` canonically and rejects repeated setting ids.
    pub fn new(
        cycle_label: impl Into<String>,
        seed: u64,
        dataset_fingerprint: impl Into<String>,
        mut rows: Vec<LedgerRow>,
    ) -> Result<Self, LedgerError> {
        rows.sort_by(|a, b| a.setting.id.cmp(&b.setting.id));
        if let Some(w) = rows.windows(2).find(|w| w[0].setting.id == w[1].setting.id) {
            return Err(LedgerError::DuplicateSetting(w[0].setting.id.clone()));
        }
        Ok(Self {
            cycle_label: cycle_label.into(),
            seed,
            dataset_fingerprint: dataset_fingerprint.into(),
            rows,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = LEDGER_COLUMNS.join(",");
        out.push('\n');
        for r in &self.rows {
            let hp = &r.setting.hp;
            let nodes: Vec<String> = hp.nodes.iter().map(u32::to_string).collect();
            let cv = &r.cv;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.cycle_label,
                r.setting.id,
                hp.nhl(),
                nodes.join(";"),
                hp.af,
                hp.ki,
                hp.opt,
                hp.lr,
                hp.mom,
                hp.decay,
                hp.dropout,
                hp.epochs,
                hp.batch_size,
                hp.l1,
                hp.l2,
                cv.fold_aucs[0],
                cv.fold_aucs[1],
                cv.fold_aucs[2],
                cv.fold_aucs[3],
                cv.fold_aucs[4],
                cv.mean_test_auc,
                cv.train_seconds,
                cv.diverged
            );
        }
        out
    }

    /// Parse a ledger CSV. The cycle label is taken from the first row;
    /// seed and fingerprint are not part of the CSV and come back empty.
    pub fn from_csv(text: &str) -> Result<Self, LedgerError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(LedgerError::Empty)?;
        let names: Vec<&str> = header.split(',').map(str::trim).collect();
        if names != LEDGER_COLUMNS {
            return Err(LedgerError::Malformed {
                line: 1,
                message: format!("expected header {}", LEDGER_COLUMNS.join(",")),
            });
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            rows.push(parse_row(line).map_err(|message| LedgerError::Malformed { line: i + 1, message })?);
        }
        let label = rows.first().map(|r| r.cycle_label.clone()).ok_or(LedgerError::Empty)?;
        Self::new(label, 0, "", rows)
    }

    pub fn read(path: &Path) -> Result<Self, LedgerError> {
        let text = fs::read_to_string(path).map_err(|source| LedgerError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_csv(&text)
    }

    pub fn write(&self, path: &Path) -> Result<(), LedgerError> {
        fs::write(path, self.to_csv()).map_err(|source| LedgerError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

fn parse_row(line: &str) -> Result<LedgerRow, String> {
    let cells: Vec<&str> = line.split(',').map(str::trim).collect();
    if cells.len() != LEDGER_COLUMNS.len() {
        return Err(format!("{} cells, expected {}", cells.len(), LEDGER_COLUMNS.len()));
    }
    fn num<T: std::str::FromStr>(cells: &[&str], i: usize) -> Result<T, String> {
        cells[i]
            .parse()
            .map_err(|_| format!("{} = {:?} is not a number", LEDGER_COLUMNS[i], cells[i]))
    }
    let id: SettingId = cells[1].parse().map_err(|_| format!("bad setting_id {:?}", cells[1]))?;
    let nhl: usize = num(&cells, 2)?;
    let nodes = cells[3]
        .split(';')
        .map(|n| n.parse::<u32>().map_err(|_| format!("bad nodes entry {n:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    if nodes.len() != nhl {
        return Err(format!("nhl {nhl} but {} node counts", nodes.len()));
    }
    let hp = DfnnHyperparameters {
        nodes,
        af: cells[4].parse().map_err(|e| format!("{e}"))?,
        ki: cells[5].parse().map_err(|e| format!("{e}"))?,
        opt: cells[6].parse().map_err(|e| format!("{e}"))?,
        lr: num(&cells, 7)?,
        mom: num(&cells, 8)?,
        decay: num(&cells, 9)?,
        dropout: num(&cells, 10)?,
        epochs: num(&cells, 11)?,
        batch_size: num(&cells, 12)?,
        l1: num(&cells, 13)?,
        l2: num(&cells, 14)?,
    };
    let mut fold_aucs = [0.0; 5];
    for (k, slot) in fold_aucs.iter_mut().enumerate() {
        *slot = num(&cells, 15 + k)?;
    }
    let diverged = match cells[22] {
        "true" => true,
        "false" => false,
        other => return Err(format!("diverged must be true or false, got {other:?}")),
    };
    Ok(LedgerRow {
        cycle_label: cells[0].to_string(),
        setting: HyperparameterSetting { id: id.clone(), hp },
        cv: CvResult {
            setting_id: id,
            fold_aucs,
            mean_test_auc: num(&cells, 20)?,
            train_seconds: num(&cells, 21)?,
            diverged,
        },
    })
}
