//! Minimal robots.txt support: User-agent groups with Disallow path
//! prefixes. Groups matching the crawler's user agent take precedence
//! over `*` groups; Allow directives and wildcards are not interpreted
//! (a disallowed prefix is simply skipped).

#[derive(Debug, Clone, Default)]
pub struct RobotsRules {
    disallow: Vec<String>,
}

impl RobotsRules {
    /// Everything allowed (used when robots.txt is absent or unreadable).
    pub fn allow_all() -> Self {
        RobotsRules::default()
    }

    pub fn parse(text: &str, user_agent: &str) -> Self {
        let ua_lower = user_agent.to_lowercase();
        let mut star: Vec<String> = Vec::new();
        let mut specific: Vec<String> = Vec::new();
        let mut matched_star = false;
        let mut matched_specific = false;
        let mut any_specific = false;

        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once(':') else {
                continue;
            };
            let key = key.trim().to_lowercase();
            let value = value.trim();
            match key.as_str() {
                "user-agent" => {
                    matched_star = value == "*";
                    matched_specific =
                        value != "*" && ua_lower.contains(&value.to_lowercase());
                    if matched_specific {
                        any_specific = true;
                    }
                }
                "disallow" => {
                    if value.is_empty() {
                        continue;
                    }
                    if matched_specific {
                        specific.push(value.to_string());
                    } else if matched_star {
                        star.push(value.to_string());
                    }
                }
                _ => {}
            }
        }

        RobotsRules {
            disallow: if any_specific { specific } else { star },
        }
    }

    pub fn allows(&self, path: &str) -> bool {
        !self.disallow.iter().any(|prefix| path.starts_with(prefix))
    }
}
