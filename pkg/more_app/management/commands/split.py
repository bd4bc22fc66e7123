from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from ...serialisers import render_json
from ...training import make_split


class Command(BaseCommand):
    help = "Print the train/val/test node index sets drawn for n nodes as JSON."

    def add_arguments(self, parser):
        parser.add_argument('n', type=int, help="Number of nodes")
        parser.add_argument('--seed', type=int, default=settings.MORE['SEED'], help="Split seed")

    def handle(self, *args, **options):
        try:
            split = make_split(options['n'], None, options['seed'])
        except ValidationError as e:
            raise CommandError("; ".join(e.messages))
        document = {
            'train': split.train.tolist(),
            'val': split.val.tolist(),
            'test': split.test.tolist(),
        }
        self.stdout.write(render_json(document).decode('utf-8'))
