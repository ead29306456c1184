use anyhow::bail;
use serde_json::Value;

use crate::Format;

/// One command result in every output format it supports.
pub struct Report {
    json: Value,
    plain: String,
    csv: Option<String>,
}

impl Report {
    pub fn new(json: Value, plain: String) -> Self {
        Self {
            json,
            plain,
            csv: None,
        }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        match format {
            Format::Plain => Ok(self.plain.clone()),
            Format::Json => {
                let mut text = serde_json::to_string_pretty(&self.json)?;
                text.push('\n');
                Ok(text)
            }
            Format::Csv => match &self.csv {
                Some(csv) => Ok(csv.clone()),
                None => bail!("csv output is only available for `table` and `inc`"),
            },
        }
    }
}
