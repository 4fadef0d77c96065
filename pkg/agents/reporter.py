# ternary_navigator/agents/reporter.py

import json
import logging
from datetime import datetime

import markdown

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

# keys that belong to the envelope rather than to a report section
_ENVELOPE_KEYS = ('schema', 'success')


def _is_row(value) -> bool:
    return isinstance(value, list) and all(isinstance(v, int) for v in value)


class ReporterAgent:
    """
    Agent responsible for rendering pipeline results as JSON, Markdown or HTML.
    """

    def __init__(self):
        logger.info("ReporterAgent initialized.")

    def _format_value(self, value) -> str:
        if isinstance(value, dict):
            return ", ".join(f"{k}: {self._format_value(v)}" for k, v in value.items())
        if isinstance(value, list):
            if _is_row(value):
                return " ".join(str(v) for v in value)
            return "; ".join(self._format_value(v) for v in value)
        return str(value)

    def _format_section(self, title: str, data) -> str:
        """Helper method to format a section of the report as Markdown."""
        lines = [f"## {title}\n"]
        if isinstance(data, dict):
            for key, value in data.items():
                lines.append(f"- **{key.replace('_', ' ').title()}**: {self._format_value(value)}")
        elif isinstance(data, list):
            for item in data:
                lines.append(f"- {self._format_value(item)}")
        else:
            lines.append(str(data))
        return "\n".join(lines) + "\n"

    def _sections(self, result: dict) -> dict:
        """Splits a result dict into report sections; scalars go to a summary section."""
        summary, sections = {}, {}
        for key, value in result.items():
            if key in _ENVELOPE_KEYS:
                continue
            if isinstance(value, (dict, list)) and value and not _is_row(value):
                sections[key.replace('_', ' ').title()] = value
            else:
                summary[key] = value
        return {'Summary': summary, **sections}

    def generate_report(self, title: str, result: dict, output_format: str = 'json') -> str | None:
        """
        Renders a result dict.

        Args:
            title (str): Report heading (Markdown and HTML only).
            result (dict): A result dict produced by the orchestrator.
            output_format (str): 'json', 'markdown' or 'html'.

        Returns:
            str | None: The rendered report, or None for an unsupported format or missing data.
        """
        logger.info(f"Generating '{title}' report in {output_format} format.")
        if result is None:
            logger.error("Cannot generate a report without a result.")
            return None

        if output_format == 'json':
            return json.dumps(result, indent=2, sort_keys=False, default=str)

        if output_format in ('markdown', 'html'):
            report_date = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
            content = [f"# {title}", f"_Generated on: {report_date}_\n"]
            if not result.get('success', True):
                content.append(f"**Error**: {result.get('error')}: {result.get('details')}\n")
            for section_title, data in self._sections(result).items():
                content.append(self._format_section(section_title, data))
            final_report = "\n".join(content)
            if output_format == 'html':
                return markdown.markdown(final_report, extensions=['tables'])
            return final_report

        logger.error(f"Unsupported report format requested: {output_format}")
        return None


# Example Usage
if __name__ == '__main__':
    reporter = ReporterAgent()
    dummy = {'schema': 1, 'success': True, 'h': 2, 'mass': '1/24',
             'labels': [{'label': '<16; 1,1,2,2,25>', 'count': 1}]}
    print(reporter.generate_report("Class number", dummy, output_format='markdown'))
