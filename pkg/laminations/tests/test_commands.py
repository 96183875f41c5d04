# laminations/tests/test_commands.py
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.test import SimpleTestCase

from laminations.standard import MANIFEST_FILE, STANDARD_FILE, load_standard_family


class BuildStandardFamilyTests(SimpleTestCase):
    def test_check_passes_on_the_shipped_family(self):
        out = StringIO()
        call_command('build_standard_family', check=True, stdout=out)
        self.assertIn('standard family OK: 3 complete, 3 nearly complete', out.getvalue())

    def test_writes_a_loadable_family(self):
        with tempfile.TemporaryDirectory() as tmp:
            call_command('build_standard_family', out=tmp, no_certificates=True, stdout=StringIO())
            folder = Path(tmp)
            self.assertFalse((folder / 'certificates').exists())
            family = load_standard_family(folder / STANDARD_FILE.name, folder / MANIFEST_FILE.name)
            self.assertEqual((len(family.complete), len(family.nearly_complete)), (3, 3))
