# Generated by Django 5.1.6 on 2026-10-19 09:12

import django.core.validators
import more_app.models
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='BenchmarkResult',
            fields=[
                ('result_id', models.AutoField(primary_key=True, serialize=False)),
                ('dataset', models.CharField(help_text="Name of the dataset (e.g., 'cora', 'football')", max_length=80, validators=[django.core.validators.RegexValidator('^[A-Za-z0-9_\\-\\.]+$', message='Dataset name can only contain letters, digits, underscores, hyphens and dots')])),
                ('model', models.CharField(help_text='Model variant: GCN, MORE-HA, MORE-SU or MORE-CO', max_length=10, validators=[more_app.models.validate_model_label])),
                ('aggregator', models.CharField(blank=True, choices=[('', 'None'), ('ha', 'Hadamard'), ('su', 'Sum'), ('co', 'Concatenation')], default='', help_text='Aggregation of the two embeddings (empty for the baseline)', max_length=2)),
                ('lr', models.FloatField(help_text='Adam learning rate', validators=[more_app.models.validate_learning_rate])),
                ('max_epoch', models.PositiveIntegerField(help_text='Epoch limit of the run')),
                ('embed_dim', models.PositiveIntegerField(help_text='Width of each embedding', validators=[django.core.validators.MinValueValidator(1)])),
                ('seed', models.IntegerField(default=0)),
                ('accuracy', models.FloatField(blank=True, help_text='Test accuracy of the best-validation parameters, in [0, 1]', null=True, validators=[django.core.validators.MinValueValidator(0.0), django.core.validators.MaxValueValidator(1.0)])),
                ('iter_count', models.PositiveIntegerField(default=0)),
                ('astt', models.FloatField(blank=True, help_text='Average single training step time in seconds', null=True)),
                ('oit', models.FloatField(blank=True, help_text='Overall iteration time in seconds', null=True)),
                ('tet', models.FloatField(blank=True, help_text='Test evaluation time in seconds', null=True)),
                ('error', models.TextField(blank=True, default='', help_text='Error message of a failed row')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['dataset', 'model', 'lr', 'max_epoch', 'embed_dim', 'result_id'],
            },
        ),
    ]
